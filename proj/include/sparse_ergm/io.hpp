#ifndef SPARSE_ERGM_IO_HPP
#define SPARSE_ERGM_IO_HPP

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sparse_ergm/errors.hpp"
#include "sparse_ergm/finner.hpp"
#include "sparse_ergm/hamiltonian.hpp"
#include "sparse_ergm/motif.hpp"
#include "sparse_ergm/weight_table.hpp"

namespace sparse_ergm::io {

using json = nlohmann::json;

/// %.17g, the fixed format for every CSV number.
inline std::string number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write " + path);
  out << text;
  if (!out) throw DomainError("write failed: " + path);
}

inline json parse(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw DomainError(what + ": " + e.what());
  }
}

inline json read_json(const std::string& path) { return parse(read_text(path), path); }

/// Wraps nlohmann type errors into domain errors with context.
template <class F>
auto decoding(const std::string& what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw DomainError(what + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Motif

inline json to_json(const Motif& m) {
  json edges = json::array();
  for (auto [u, v] : m.edges()) edges.push_back({u, v});
  return {{"name", m.name()}, {"vertices", m.vertex_count()}, {"edges", edges}};
}

inline Motif motif_from_json(const json& j) {
  return decoding("motif", [&] {
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2) throw DomainError("motif: each edge must be a pair");
      edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    return Motif(j.at("vertices").get<int>(), std::move(edges), j.value("name", std::string{}));
  });
}

inline bool same_motif(const Motif& a, const Motif& b) {
  return a.vertex_count() == b.vertex_count() && a.edges() == b.edges() && a.name() == b.name();
}

/// A built-in name or a full motif object.
inline Motif motif_ref(const json& j) {
  if (j.is_string()) return builtin_motif(j.get<std::string>());
  return motif_from_json(j);
}

inline json motif_ref_json(const Motif& m) {
  if (!m.name().empty()) {
    try {
      if (same_motif(builtin_motif(m.name()), m)) return m.name();
    } catch (const DomainError&) {
    }
  }
  return to_json(m);
}

/// Comma separated built-in names, e.g. "K12,C3,C4".
inline std::vector<Motif> motif_list(const std::string& csv) {
  std::vector<Motif> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(builtin_motif(item));
  if (out.empty()) throw DomainError("empty motif list");
  return out;
}

inline std::vector<double> number_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw DomainError("not a number: " + item);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// WeightTable

inline json to_json(const WeightTable& t) { return {{"n", t.n()}, {"triangle", t.triangle()}}; }

inline WeightTable table_from_json(const json& j) {
  return decoding("weight table", [&] {
    const auto tri = j.at("triangle").get<std::vector<double>>();
    return WeightTable::from_triangle(j.at("n").get<int>(), tri);
  });
}

namespace detail {

template <class T>
T to_little(T x) {
  if constexpr (std::endian::native == std::endian::little) {
    return x;
  } else {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &x, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&x, b, sizeof(T));
    return x;
  }
}

}  // namespace detail

/// u32 n, then the strict lower triangle row by row as float64, little-endian.
inline std::string encode_binary(const WeightTable& t) {
  std::string out;
  const std::uint32_t n = detail::to_little(static_cast<std::uint32_t>(t.n()));
  out.append(reinterpret_cast<const char*>(&n), sizeof n);
  for (double x : t.triangle()) {
    const double le = detail::to_little(x);
    out.append(reinterpret_cast<const char*>(&le), sizeof le);
  }
  return out;
}

inline WeightTable decode_binary(const std::string& bytes) {
  if (bytes.size() < 4) throw DomainError("weight table binary: truncated header");
  std::uint32_t n;
  std::memcpy(&n, bytes.data(), 4);
  n = detail::to_little(n);
  if (n == 0 || n > (1u << 16)) throw DomainError("weight table binary: implausible n");
  const std::size_t count = static_cast<std::size_t>(n) * (n - 1) / 2;
  if (bytes.size() != 4 + 8 * count) throw DomainError("weight table binary: length does not match n");
  std::vector<double> tri(count);
  for (std::size_t k = 0; k < count; ++k) {
    double x;
    std::memcpy(&x, bytes.data() + 4 + 8 * k, 8);
    tri[k] = detail::to_little(x);
  }
  return WeightTable::from_triangle(static_cast<int>(n), tri);
}

inline void write_binary(const std::string& path, const WeightTable& t) { write_text(path, encode_binary(t)); }
inline WeightTable read_binary(const std::string& path) { return decode_binary(read_text(path)); }

/// Binary when the path ends in .bin, JSON otherwise.
inline WeightTable read_table(const std::string& path) {
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".bin") return read_binary(path);
  return table_from_json(read_json(path));
}

// ---------------------------------------------------------------------------
// Hamiltonian

inline json to_json(const HamiltonianSpec& h) {
  json family = json::array(), terms = json::array();
  for (const auto& m : h.family.motifs) family.push_back(motif_ref_json(m));
  for (const auto& t : h.terms) terms.push_back({{"k", t.k}, {"beta", t.beta}, {"shift", t.shift}, {"gamma", t.gamma}});
  json j{{"family", family}, {"terms", terms}, {"allow_degenerate", h.allow_degenerate}};
  if (!h.family.warnings.empty()) j["allow_mixed_degree"] = true;
  return j;
}

inline HamiltonianSpec hamiltonian_from_json(const json& j) {
  return decoding("hamiltonian", [&] {
    std::vector<Motif> motifs;
    for (const auto& m : j.at("family")) motifs.push_back(motif_ref(m));
    HamiltonianSpec h;
    h.family = MotifFamily::make(std::move(motifs), j.value("allow_mixed_degree", false));
    for (const auto& t : j.at("terms"))
      h.terms.push_back({t.at("k").get<int>(), t.at("beta").get<double>(), t.value("shift", 1.0),
                         t.at("gamma").get<double>()});
    h.allow_degenerate = j.value("allow_degenerate", false);
    validate(h);
    return h;
  });
}

// ---------------------------------------------------------------------------
// Finner instance

inline json to_json(const finner::ProductInstance& inst) {
  json system = json::array(), functions = json::array();
  for (std::size_t a = 0; a < inst.system.size(); ++a) {
    system.push_back({{"A", inst.system[a].vertices}, {"lambda", inst.system[a].lambda}});
    functions.push_back({{"A_index", a}, {"values", inst.functions[a]}});
  }
  return {{"spaces", inst.spaces}, {"system", system}, {"functions", functions}};
}

inline finner::ProductInstance instance_from_json(const json& j) {
  return decoding("finner instance", [&] {
    finner::ProductInstance inst;
    inst.spaces = j.at("spaces").get<std::vector<std::vector<double>>>();
    for (const auto& s : j.at("system"))
      inst.system.push_back({s.at("A").get<std::vector<int>>(), s.at("lambda").get<double>()});
    inst.functions.assign(inst.system.size(), {});
    std::vector<char> seen(inst.system.size(), 0);
    for (const auto& f : j.at("functions")) {
      const int a = f.at("A_index").get<int>();
      if (a < 0 || static_cast<std::size_t>(a) >= inst.system.size() || seen[a])
        throw DomainError("finner instance: bad or repeated A_index");
      seen[a] = 1;
      inst.functions[a] = f.at("values").get<std::vector<double>>();
    }
    finner::validate(inst);
    return inst;
  });
}

// ---------------------------------------------------------------------------
// CSV

inline std::string csv_line(const std::vector<std::string>& cells) {
  std::string s;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k) s += ',';
    s += cells[k];
  }
  return s + '\n';
}

}  // namespace sparse_ergm::io

#endif  // SPARSE_ERGM_IO_HPP
