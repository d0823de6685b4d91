#ifndef VNMIX_IO_HPP
#define VNMIX_IO_HPP

// JSON files for algebras, elements, functionals, channels and decision
// reports. Requires nlohmann/json (json.hpp on the include path).
//
//   algebra     {"blocks": [n1, n2, ...]}
//   matrix      [[[re, im], ...], ...]            row-major
//   element     [matrix, ...]                     one per block
//   functional  {"algebra": {...}, "densities": [matrix, ...]}
//   channel     {"algebra": {...}, "kraus": [element, ...]}
//            or {"algebra": {...}, "choi_blocks": [matrix, ...]}
//
// Parse errors name the offending field as a JSON path ("densities[1][0][2]").

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "vnmix/algebra.hpp"
#include "vnmix/channels.hpp"
#include "vnmix/functionals.hpp"
#include "vnmix/reachability.hpp"

namespace vnmix::io {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

inline constexpr double kLoadHermitianTol = 1e-9;

class ParseError : public Error {
 public:
  ParseError(const std::string& path, const std::string& what) : Error(path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

namespace detail {

inline std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }
inline std::string field(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

inline const json& require(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw ParseError(path.empty() ? "<root>" : path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw ParseError(field(path, key), "missing field");
  return *it;
}

inline double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ParseError(path, "expected a number");
  return j.get<double>();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// writers

inline ordered_json to_json(const AlgebraSpec& a) {
  ordered_json j;
  j["blocks"] = a.block_dims();
  return j;
}

inline ordered_json to_json(const Matrix& m) {
  ordered_json rows = ordered_json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (std::size_t k = 0; k < m.cols(); ++k) row.push_back({m(i, k).real(), m(i, k).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

inline ordered_json to_json(const Element& x) {
  ordered_json j = ordered_json::array();
  for (const auto& b : x.blocks()) j.push_back(to_json(b));
  return j;
}

inline ordered_json to_json(const Functional& w) {
  ordered_json j;
  j["algebra"] = to_json(w.algebra());
  ordered_json d = ordered_json::array();
  for (const auto& m : w.densities()) d.push_back(to_json(m));
  j["densities"] = std::move(d);
  return j;
}

inline ordered_json to_json(const CenterElement& c) {
  ordered_json j = ordered_json::array();
  for (double v : c.real_values()) j.push_back(v);
  return j;
}

inline ordered_json to_json(const KrausMap& k) {
  ordered_json j;
  j["algebra"] = to_json(k.algebra());
  ordered_json list = ordered_json::array();
  for (const auto& a : k.kraus()) list.push_back(to_json(a));
  j["kraus"] = std::move(list);
  return j;
}

inline ordered_json to_json(const ModuleMapChoi& c) {
  ordered_json j;
  j["algebra"] = to_json(c.algebra());
  ordered_json list = ordered_json::array();
  for (const auto& b : c.choi_blocks()) list.push_back(to_json(b));
  j["choi_blocks"] = std::move(list);
  return j;
}

inline ordered_json to_json(const Certificate& c) {
  ordered_json j;
  j["kind"] = c.kind;
  if (c.ideal) {
    ordered_json blocks = ordered_json::array();
    for (auto b : c.ideal->blocks()) blocks.push_back(b + 1);
    j["ideal"] = std::move(blocks);
  }
  if (c.weight) j["weight"] = to_json(*c.weight);
  ordered_json values = ordered_json::object();
  for (const auto& [k, v] : c.values) values[k] = v;
  j["values"] = std::move(values);
  return j;
}

inline ordered_json to_json(const Decision& d) {
  ordered_json j;
  j["verdict"] = to_string(d.verdict);
  j["margin"] = d.margin;
  j["band"] = d.band;
  j["certificate"] = d.certificate ? to_json(*d.certificate) : ordered_json(nullptr);
  j["explanation"] = d.explanation;
  j["theorem"] = d.theorem;
  return j;
}

// ---------------------------------------------------------------------------
// readers

inline AlgebraSpec algebra_from_json(const json& j, const std::string& path = "algebra") {
  const auto& blocks = detail::require(j, "blocks", path);
  const auto bpath = detail::field(path, "blocks");
  if (!blocks.is_array()) throw ParseError(bpath, "expected an array of block dimensions");
  std::vector<int> dims;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (!blocks[i].is_number_integer()) throw ParseError(detail::at(bpath, i), "expected an integer");
    dims.push_back(blocks[i].get<int>());
  }
  try {
    return AlgebraSpec::validate(dims);
  } catch (const Error& e) {
    throw ParseError(bpath, e.what());
  }
}

inline Matrix matrix_from_json(const json& j, std::size_t n, const std::string& path) {
  if (!j.is_array() || j.size() != n)
    throw ParseError(path, "expected " + std::to_string(n) + " rows");
  Matrix m(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto rp = detail::at(path, r);
    if (!j[r].is_array() || j[r].size() != n) throw ParseError(rp, "expected " + std::to_string(n) + " entries");
    for (std::size_t c = 0; c < n; ++c) {
      const auto cp = detail::at(rp, c);
      const auto& e = j[r][c];
      if (e.is_number()) {
        m(r, c) = e.get<double>();
      } else if (e.is_array() && e.size() == 2) {
        m(r, c) = cplx(detail::number(e[0], detail::at(cp, 0)), detail::number(e[1], detail::at(cp, 1)));
      } else {
        throw ParseError(cp, "expected [re, im]");
      }
    }
  }
  return m;
}

inline std::vector<Matrix> blocks_from_json(const json& j, const AlgebraSpec& a, const std::string& path) {
  if (!j.is_array() || j.size() != a.blocks())
    throw ParseError(path, "expected " + std::to_string(a.blocks()) + " blocks");
  std::vector<Matrix> out;
  for (std::size_t i = 0; i < a.blocks(); ++i) out.push_back(matrix_from_json(j[i], a.dim(i), detail::at(path, i)));
  return out;
}

inline Element element_from_json(const json& j, const AlgebraSpec& a, const std::string& path = "element") {
  return {a, blocks_from_json(j, a, path)};
}

inline Functional functional_from_json(const json& j, const std::string& path = "") {
  const auto a = algebra_from_json(detail::require(j, "algebra", path), detail::field(path, "algebra"));
  const auto dpath = detail::field(path, "densities");
  auto dens = blocks_from_json(detail::require(j, "densities", path), a, dpath);
  for (std::size_t i = 0; i < dens.size(); ++i) {
    const double h = dens[i].hermiticity_residual();
    if (h > kLoadHermitianTol)
      throw ParseError(detail::at(dpath, i), "density is not hermitian (residual " + std::to_string(h) + ")");
    dens[i] = dens[i].hermitian_part();
  }
  return {a, std::move(dens)};
}

struct ChannelFile {
  std::optional<KrausMap> kraus;
  std::optional<ModuleMapChoi> choi;

  KrausMap as_kraus(const Tolerances& tol = {}) const { return kraus ? *kraus : kraus_from_choi(*choi, tol); }
  ModuleMapChoi as_choi() const { return choi ? *choi : choi_of(*kraus); }
};

inline ChannelFile channel_from_json(const json& j, const std::string& path = "") {
  const auto a = algebra_from_json(detail::require(j, "algebra", path), detail::field(path, "algebra"));
  ChannelFile ch;
  const bool has_kraus = j.contains("kraus"), has_choi = j.contains("choi_blocks");
  if (has_kraus == has_choi) throw ParseError(path.empty() ? "<root>" : path, "expected exactly one of kraus, choi_blocks");
  if (has_kraus) {
    const auto kpath = detail::field(path, "kraus");
    const auto& list = j["kraus"];
    if (!list.is_array()) throw ParseError(kpath, "expected an array of elements");
    std::vector<Element> ks;
    for (std::size_t k = 0; k < list.size(); ++k) ks.push_back(element_from_json(list[k], a, detail::at(kpath, k)));
    ch.kraus = KrausMap(a, std::move(ks));
  } else {
    const auto cpath = detail::field(path, "choi_blocks");
    const auto& list = j["choi_blocks"];
    if (!list.is_array() || list.size() != a.blocks())
      throw ParseError(cpath, "expected " + std::to_string(a.blocks()) + " blocks");
    std::vector<Matrix> blocks;
    for (std::size_t i = 0; i < a.blocks(); ++i)
      blocks.push_back(matrix_from_json(list[i], a.dim(i) * a.dim(i), detail::at(cpath, i)));
    ch.choi = ModuleMapChoi(a, std::move(blocks));
  }
  return ch;
}

// ---------------------------------------------------------------------------
// files

inline json read_json_file(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw Error("cannot open " + file);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(file + ": malformed JSON (" + e.what() + ")");
  }
}

inline Functional read_functional(const std::string& file) {
  const auto j = read_json_file(file);
  try {
    return functional_from_json(j);
  } catch (const ParseError& e) {
    throw Error(file + ": " + e.what());
  }
}

inline ChannelFile read_channel(const std::string& file) {
  const auto j = read_json_file(file);
  try {
    return channel_from_json(j);
  } catch (const ParseError& e) {
    throw Error(file + ": " + e.what());
  }
}

inline std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

// Write to a sibling temporary and rename over the target.
inline void write_file_atomic(const std::string& file, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(file);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error("cannot move " + tmp.string() + " to " + file + ": " + ec.message());
  }
}

}  // namespace vnmix::io

#endif  // VNMIX_IO_HPP
