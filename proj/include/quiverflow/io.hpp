/**
 * @file io.hpp
 * @brief JSON encodings of quivers, points, charts, L_ζ elements, operators and
 *        KP seeds, with a fixed 17-significant-digit writer.
 */
#pragma once

#include "kp.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace quiverflow::io {

using json = nlohmann::ordered_json;

inline std::string schema(const std::string& kind) { return "quiverflow." + kind + ".v1"; }

inline void expect_schema(const json& j, const std::string& kind) {
  if (!j.is_object()) throw Error("expected a JSON object for " + kind);
  if (j.contains("schema") && j["schema"] != schema(kind))
    throw Error("schema mismatch: expected " + schema(kind) + ", got " + j["schema"].dump());
}

// ---------------------------------------------------------------- writer

namespace detail {
inline void format_number(std::string& out, double x) {
  if (!std::isfinite(x)) {
    out += "null";
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  out += buf;
}

inline void write(std::string& out, const json& j, int indent, int depth) {
  auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(size_t(indent * d), ' ');
  };
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        write(out, it.value(), indent, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // scalars and arrays of scalars (complex pairs, matrix rows) stay on one line
      bool flat = true;
      for (const auto& e : j) {
        if (e.is_object()) flat = false;
        if (e.is_array())
          for (const auto& x : e) flat = flat && !x.is_structured();
      }
      out += '[';
      for (size_t i = 0; i < j.size(); ++i) {
        if (i) out += flat && indent >= 0 ? ", " : ",";
        if (!flat) newline(depth + 1);
        write(out, j[i], flat ? -1 : indent, depth + 1);
      }
      if (!flat) newline(depth);
      out += ']';
      return;
    }
    case json::value_t::number_float: format_number(out, j.get<double>()); return;
    default: out += j.dump();
  }
}
}  // namespace detail

/// Serialization with every float printed as %.17g, so identical values give identical bytes.
inline std::string dump(const json& j, int indent = 2) {
  std::string out;
  detail::write(out, j, indent, 0);
  return out;
}

inline json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(path + ": " + e.what());
  }
}

inline void write_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << dump(j) << '\n';
}

// ---------------------------------------------------------------- scalars and matrices

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx complex_from(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw Error("expected a number or a [re, im] pair, got " + j.dump());
}

inline json to_json(const std::vector<cplx>& v) {
  json a = json::array();
  for (auto z : v) a.push_back(to_json(z));
  return a;
}

inline std::vector<cplx> complex_list(const json& j) {
  if (!j.is_array()) throw Error("expected an array of complex numbers");
  std::vector<cplx> out;
  for (const auto& e : j) out.push_back(complex_from(e));
  return out;
}

inline json to_json(const Mat& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int k = 0; k < m.cols(); ++k) row.push_back(to_json(m(i, k)));
    rows.push_back(row);
  }
  return rows;
}

inline Mat matrix_from(const json& j, int rows, int cols) {
  if (!j.is_array()) throw Error("expected a matrix (array of rows)");
  Mat m(rows, cols);
  if (rows == 0 || cols == 0) {
    if (!j.empty() && !(j.size() == size_t(rows) && j[0].empty()))
      throw Error("expected an empty matrix");
    return m;
  }
  if (int(j.size()) != rows) throw Error("matrix has " + std::to_string(j.size()) + " rows, expected " + std::to_string(rows));
  for (int i = 0; i < rows; ++i) {
    if (!j[i].is_array() || int(j[i].size()) != cols)
      throw Error("matrix row " + std::to_string(i) + " should have " + std::to_string(cols) + " entries");
    for (int k = 0; k < cols; ++k) m(i, k) = complex_from(j[i][k]);
  }
  return m;
}

/// Parses "1.5", "-2i", "0.3+0.4i", "1e-3-2e-2i".
inline cplx parse_complex(const std::string& s) {
  std::string t;
  for (char ch : s)
    if (!std::isspace(static_cast<unsigned char>(ch))) t += ch;
  if (t.empty()) throw Error("empty number");
  auto number = [&](const std::string& u) {
    if (u.empty() || u == "+") return 1.0;
    if (u == "-") return -1.0;
    size_t pos = 0;
    double v = std::stod(u, &pos);
    if (pos != u.size()) throw Error("malformed number '" + s + "'");
    return v;
  };
  try {
    if (t.back() != 'i') return number(t);
    std::string body = t.substr(0, t.size() - 1);
    // split at the last sign that is not part of an exponent
    size_t split = std::string::npos;
    for (size_t i = body.size(); i-- > 1;)
      if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
        split = i;
        break;
      }
    if (split == std::string::npos) return {0.0, number(body)};
    return {number(body.substr(0, split)), number(body.substr(split))};
  } catch (const std::logic_error&) {
    throw Error("malformed number '" + s + "'");
  }
}

inline std::vector<std::string> split(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

inline std::vector<cplx> parse_complex_list(const std::string& s) {
  std::vector<cplx> out;
  for (const auto& t : split(s)) out.push_back(parse_complex(t));
  return out;
}

inline std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  for (const auto& t : split(s)) {
    size_t pos = 0;
    int v = 0;
    try {
      v = std::stoi(t, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != t.size()) throw Error("malformed integer '" + t + "'");
    out.push_back(v);
  }
  return out;
}

// ---------------------------------------------------------------- quivers and points

/// A quiver is either a built-in name or {"vertices": [...], "edges": [{"id","tail","head"}]}.
inline Quiver quiver_from(const json& j) {
  if (j.is_string()) return builtin_quiver(j.get<std::string>());
  if (!j.is_object() || !j.contains("vertices") || !j.contains("edges"))
    throw Error("quiver needs 'vertices' and 'edges'");
  std::vector<std::string> vertices;
  for (const auto& v : j["vertices"]) vertices.push_back(v.get<std::string>());
  Quiver names(vertices, {});
  std::vector<Edge> edges;
  for (const auto& e : j["edges"])
    edges.push_back({e.at("id").get<std::string>(), names.vertex_index(e.at("tail").get<std::string>()),
                     names.vertex_index(e.at("head").get<std::string>())});
  return Quiver(vertices, edges);
}

inline json to_json(const Quiver& q) {
  json j{{"vertices", q.vertices()}, {"edges", json::array()}};
  for (const auto& e : q.edges())
    j["edges"].push_back({{"id", e.id}, {"tail", q.vertex_name(e.tail)}, {"head", q.vertex_name(e.head)}});
  return j;
}

/// Base quiver of a (framed) double quiver: drops starred and framing edges and the vertex ∞.
inline std::pair<Quiver, DimVector> base_of(const Quiver& q) {
  std::vector<std::string> vertices;
  std::vector<int> index(q.num_vertices(), -1);
  for (int v = 0; v < q.num_vertices(); ++v)
    if (q.is_base_vertex(v)) {
      index[v] = int(vertices.size());
      vertices.push_back(q.vertex_name(v));
    }
  std::vector<Edge> edges;
  for (int e : q.base_edges()) {
    const auto& ed = q.edge(e);
    if (!q.is_base_vertex(ed.tail) || !q.is_base_vertex(ed.head)) continue;
    edges.push_back({ed.id, index[ed.tail], index[ed.head]});
  }
  DimVector zeta;
  for (int v = 0; v < q.num_vertices(); ++v)
    if (q.is_base_vertex(v)) zeta.push_back(q.zeta(v));
  return {Quiver(vertices, edges), zeta};
}

inline Weight weight_from(const json& j) { return complex_list(j); }

/**
 * {"schema", "quiver", "zeta"?, "dims": {vertex: n}, "mats": {edge id: matrix}, "weight"?}.
 * With "zeta" the point lives on the doubled framed quiver (vertex "inf", edges b<i>_<r>).
 */
inline RepPoint point_from(const json& j, Weight* weight = nullptr) {
  expect_schema(j, "point");
  Quiver base = quiver_from(j.at("quiver"));
  QuiverPtr q;
  if (j.contains("zeta")) {
    DimVector zeta(base.num_vertices(), 0);
    for (auto it = j["zeta"].begin(); it != j["zeta"].end(); ++it) zeta[base.vertex_index(it.key())] = it.value().get<int>();
    q = std::make_shared<const Quiver>(double_quiver(frame(base, zeta).quiver));
  } else {
    q = std::make_shared<const Quiver>(double_quiver(base));
  }
  DimVector dims(q->num_vertices(), 0);
  for (auto it = j.at("dims").begin(); it != j.at("dims").end(); ++it) dims[q->vertex_index(it.key())] = it.value().get<int>();
  RepPoint v = RepPoint::zero(q, dims);
  const json& mats = j.at("mats");
  for (int e = 0; e < q->num_edges(); ++e) {
    const auto& ed = q->edge(e);
    int rows = dims[ed.head], cols = dims[ed.tail];
    if (!mats.contains(ed.id)) {
      if (rows * cols == 0) continue;
      throw Error("point is missing the matrix for edge " + ed.id);
    }
    v.mats[e] = matrix_from(mats[ed.id], rows, cols);
  }
  for (auto it = mats.begin(); it != mats.end(); ++it) q->edge_index(it.key());
  if (weight && j.contains("weight")) {
    *weight = weight_from(j["weight"]);
    check_length(*q, weight->size());
  }
  return v;
}

inline json to_json(const RepPoint& v, const Weight* weight = nullptr) {
  const Quiver& q = *v.quiver;
  json j{{"schema", schema("point")}};
  if (q.framed()) {
    auto [base, zeta] = base_of(q);
    j["quiver"] = to_json(base);
    json z = json::object();
    for (int i = 0; i < base.num_vertices(); ++i)
      if (zeta[i] > 0) z[base.vertex_name(i)] = zeta[i];
    j["zeta"] = z;
  } else {
    auto [base, zeta] = base_of(q);
    j["quiver"] = to_json(base);
  }
  json dims = json::object();
  for (int i = 0; i < q.num_vertices(); ++i) dims[q.vertex_name(i)] = v.dims[i];
  j["dims"] = dims;
  json mats = json::object();
  for (int e = 0; e < q.num_edges(); ++e) mats[q.edge(e).id] = to_json(v.mats[e]);
  j["mats"] = mats;
  if (weight) j["weight"] = to_json(*weight);
  return j;
}

// ---------------------------------------------------------------- charts

inline json to_json(const DarbouxChart& c) {
  json j{{"schema", schema("chart")}, {"kind", chart_kind_str(c.kind)}, {"m", c.m}, {"d", c.d},
         {"x", to_json(c.x)}, {"p", to_json(c.p)}, {"phi", json::array()}, {"psi", json::array()}};
  for (int a = 0; a < c.n(); ++a) {
    j["phi"].push_back(to_json(c.phi[a]));
    j["psi"].push_back(to_json(c.psi[a]));
  }
  return j;
}

/// Spin data may be omitted when it is 1×1 (fixed by the normalization).
inline DarbouxChart chart_from(const json& j, const Weight& lambda) {
  expect_schema(j, "chart");
  DarbouxChart c;
  c.kind = parse_chart_kind(j.value("kind", std::string("jordan")));
  c.m = j.value("m", 1);
  c.d = j.value("d", 1);
  c.x = complex_list(j.at("x"));
  c.p = j.contains("p") ? complex_list(j["p"]) : std::vector<cplx>(c.x.size(), 0.0);
  const int cols = c.spin_cols();
  for (int a = 0; a < c.n(); ++a) {
    if (j.contains("phi")) c.phi.push_back(matrix_from(j["phi"].at(a), c.d, cols));
    else if (c.d * cols == 1) c.phi.push_back(Mat::Ones(1, 1));
    else throw Error("chart needs 'phi' when spins are not 1×1");
    if (j.contains("psi")) c.psi.push_back(matrix_from(j["psi"].at(a), cols, c.d));
    else if (c.d * cols == 1) c.psi.push_back(Mat::Ones(1, 1));
    else throw Error("chart needs 'psi' when spins are not 1×1");
  }
  if (int(lambda.size()) != c.m) throw Error("weight must have m entries");
  normalize(c, lambda);
  check_chart(c);
  return c;
}

// ---------------------------------------------------------------- L_ζ elements

/// {"components": [{"start": vertex, "path": [starred edge ids], "matrix": ζ_i × ζ_j}]}.
inline LZetaElement lzeta_from(const json& j, const Quiver& q) {
  expect_schema(j, "lzeta");
  LZetaElement a;
  a.cap = j.value("cap", 12);
  for (const auto& c : j.at("components")) {
    StarPath p;
    for (const auto& id : c.at("path")) p.letters.push_back(q.edge_index(id.get<std::string>()));
    if (p.letters.empty()) {
      p.start = q.vertex_index(c.at("start").get<std::string>());
    } else {
      p.start = q.edge(p.letters.front()).tail;
      if (c.contains("start") && q.vertex_index(c["start"].get<std::string>()) != p.start)
        throw Error("path does not begin at its declared start");
    }
    int at = p.start;
    for (int e : p.letters) {
      if (!is_star_letter(q, e)) throw Error("L_zeta paths use starred base edges only");
      if (q.edge(e).tail != at) throw Error("L_zeta path is not composable");
      at = q.edge(e).head;
    }
    p.end = at;
    a.add(p, matrix_from(c.at("matrix"), q.zeta(p.start), q.zeta(p.end)));
  }
  return a;
}

// ---------------------------------------------------------------- operators

inline json to_json(const Polynomial& p) {
  std::vector<cplx> c(p.c.begin(), p.c.begin() + (p.degree() + 1));
  return to_json(c);
}

inline json to_json(const RationalFunction& f) {
  return {{"num", to_json(f.numerator())}, {"den", to_json(f.denominator())}};
}

inline RationalFunction rational_from(const json& j) {
  Polynomial num(complex_list(j.at("num")));
  Polynomial den = j.contains("den") ? Polynomial(complex_list(j["den"])) : Polynomial::constant(1.0);
  if (den.is_zero()) throw Error("rational function with zero denominator");
  return RationalFunction(num, den);
}

inline std::shared_ptr<const RationalField> field_from(const json& j) {
  int m = j.value("m", 1);
  Weight lambda = j.contains("lambda") ? weight_from(j["lambda"]) : Weight(m, 1.0 / m);
  return std::make_shared<const RationalField>(CherednikData(m, lambda));
}

/// {"m", "lambda", "window": [lo, hi], "floor"?, "terms": [{"k", "j", "num", "den"}]}: Σ f_{jk}(x) σ^j y^k.
inline HBar<RationalField> operator_from(const json& j, std::shared_ptr<const RationalField> f = nullptr) {
  expect_schema(j, "operator");
  if (!f) f = field_from(j);
  int lo = j.contains("window") ? j["window"].at(0).get<int>() : -12;
  auto h = hbar_zero(f, lo);
  for (const auto& t : j.at("terms")) {
    int k = t.at("k").get<int>(), s = t.value("j", 0);
    if (s < 0 || s >= f->m()) throw Error("σ power out of range");
    auto g = crossed_zero(*f);
    g[s] = rational_from(t);
    h.add_term(k, g);
  }
  if (j.contains("floor") && j["floor"].is_number_integer()) h.floor = j["floor"].get<int>();
  return h;
}

inline json to_json(const HBar<RationalField>& h, int hi = 6) {
  const auto& f = *h.field;
  json j{{"schema", schema("operator")},
         {"m", f.m()},
         {"lambda", to_json(f.data.lambda)},
         {"window", json::array({h.lo, std::max(hi, h.max_order())})},
         {"floor", h.floor == kExactFloor ? json(nullptr) : json(h.guaranteed_floor())},
         {"terms", json::array()}};
  for (auto it = h.terms.rbegin(); it != h.terms.rend(); ++it)
    for (int s = 0; s < f.m(); ++s) {
      if (it->second[s].is_zero()) continue;
      json t{{"k", it->first}, {"j", s}};
      t.update(to_json(it->second[s]));
      j["terms"].push_back(t);
    }
  return j;
}

// ---------------------------------------------------------------- KP seeds

/**
 * {"lambda": base weight, "kind": jordan|eps0|delta, "window": [lo, hi], "a"?: diagonal of A,
 *  and either "chart" (Darboux data) or "point" (a framed cyclic point)}.
 */
inline KpSeed seed_from(const json& j) {
  expect_schema(j, "seed");
  int m = 1;
  if (j.contains("chart")) m = j["chart"].value("m", 1);
  Weight lambda = j.contains("lambda") ? weight_from(j["lambda"]) : Weight(m, 1.0);
  CyclicPoint c;
  ChartKind kind;
  if (j.contains("chart")) {
    DarbouxChart ch = chart_from(j["chart"], lambda);
    c = from_darboux(ch, lambda);
    kind = ch.kind;
  } else if (j.contains("point")) {
    c = from_rep(point_from(j["point"]));
    if (int(lambda.size()) != c.m) throw Error("seed weight must have m entries");
    bool eps0 = true;
    for (int i = 1; i < c.m; ++i) eps0 = eps0 && c.zeta[i] == 0;
    kind = c.m == 1 ? ChartKind::Jordan : eps0 ? ChartKind::Eps0 : ChartKind::Delta;
  } else {
    throw Error("seed needs a 'chart' or a 'point'");
  }
  if (j.contains("kind")) kind = parse_chart_kind(j["kind"].get<std::string>());
  int lo = j.contains("window") ? j["window"].at(0).get<int>() : -12;
  KpSeed s = make_seed(c, lambda, kind, lo);
  if (j.contains("window")) s.hi = j["window"].at(1).get<int>();
  if (s.lo >= 0 || s.hi <= 0) throw Error("seed window needs lo < 0 < hi");
  if (j.contains("a")) {
    s.a = complex_list(j["a"]);
    if (int(s.a.size()) != s.d()) throw Error("'a' must have d entries");
  }
  return s;
}

inline json to_json(const KpSeed& s) {
  Weight framed = framed_weight(s.lambda, s.point.alpha);
  json j{{"schema", schema("seed")},
         {"kind", chart_kind_str(s.kind)},
         {"lambda", to_json(s.lambda)},
         {"window", json::array({s.lo, s.hi})}};
  if (!s.a.empty()) j["a"] = to_json(s.a);
  j["point"] = to_json(to_rep(s.point), &framed);
  return j;
}

}  // namespace quiverflow::io
