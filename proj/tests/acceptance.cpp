// Runs every acceptance criterion once and prints one line per criterion.
#include "quiverflow/acceptance.hpp"

#include <iostream>

int main(int argc, char** argv) {
  using namespace quiverflow::acceptance;
  std::uint64_t seed = argc > 1 ? std::stoull(argv[1]) : 42;
  auto outs = run(seed, {}, [](const Outcome& o) { std::cout << summary_line(o) << std::endl; });
  bool ok = true;
  for (const auto& o : outs) ok = ok && o.pass();
  std::cout << (ok ? "all criteria pass" : "some criteria fail") << std::endl;
  return ok ? 0 : 1;
}
