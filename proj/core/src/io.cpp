#include "tphase/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace tphase::io {

namespace {

using nlohmann::json;

[[noreturn]] void format_error(const std::string& what) { throw Error(ErrorCode::kFormat, what); }

const json& require_key(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) format_error(std::string("missing key '") + key + "'");
  return j.at(key);
}

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed) {
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || item.key() == a;
    if (!ok) format_error("unknown key '" + item.key() + "'");
  }
}

Index require_dim(const json& j, const char* key, Index min) {
  const json& v = require_key(j, key);
  if (!v.is_number_integer() || v.get<long long>() < min) {
    format_error(std::string("'") + key + "' must be an integer >= " + std::to_string(min));
  }
  return static_cast<Index>(v.get<long long>());
}

double require_finite(const json& v, const char* what) {
  if (!v.is_number()) format_error(std::string(what) + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) format_error(std::string(what) + " must be finite");
  return d;
}

Polynomial read_poly(const json& j, const char* key) {
  const json& v = require_key(j, key);
  if (!v.is_array() || v.empty()) format_error(std::string("'") + key + "' must be a nonempty array");
  Polynomial p;
  for (const auto& c : v) p.push_back(require_finite(c, "polynomial coefficient"));
  return p;
}

json tensor_to_json(const Tensor3& t) {
  json data = json::array();
  for (Index k = 0; k < t.tubes(); ++k) {
    json slice = json::array();
    for (Index i = 0; i < t.rows(); ++i) {
      json row = json::array();
      for (Index j = 0; j < t.cols(); ++j) row.push_back({t(i, j, k).real(), t(i, j, k).imag()});
      slice.push_back(row);
    }
    data.push_back(slice);
  }
  return {{"m", t.rows()}, {"n", t.cols()}, {"p", t.tubes()}, {"data", data}};
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    format_error(std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Tensor3 tensor_from_json(const json& j) {
  if (!j.is_object()) format_error("tensor must be a JSON object");
  reject_unknown_keys(j, {"m", "n", "p", "data"});
  const Index m = require_dim(j, "m", 0);
  const Index n = require_dim(j, "n", 0);
  const Index p = require_dim(j, "p", 1);
  const json& data = require_key(j, "data");
  if (!data.is_array() || static_cast<Index>(data.size()) != p) format_error("'data' must hold p slices");
  Tensor3 t(m, n, p);
  for (Index k = 0; k < p; ++k) {
    const json& slice = data[static_cast<std::size_t>(k)];
    if (!slice.is_array() || static_cast<Index>(slice.size()) != m) format_error("ragged tensor: slice row count differs from m");
    for (Index i = 0; i < m; ++i) {
      const json& row = slice[static_cast<std::size_t>(i)];
      if (!row.is_array() || static_cast<Index>(row.size()) != n) format_error("ragged tensor: row length differs from n");
      for (Index c = 0; c < n; ++c) {
        const json& z = row[static_cast<std::size_t>(c)];
        if (!z.is_array() || z.size() != 2) format_error("tensor entries must be [re, im] pairs");
        t(i, c, k) = Complex(require_finite(z[0], "entry"), require_finite(z[1], "entry"));
      }
    }
  }
  return t;
}

Tensor3 parse_ttj(const std::string& text) { return tensor_from_json(parse_json(text)); }

std::string format_ttj(const Tensor3& t) {
  std::string out = "{\"m\": " + std::to_string(t.rows()) + ", \"n\": " + std::to_string(t.cols()) +
                    ", \"p\": " + std::to_string(t.tubes()) + ", \"data\": [";
  for (Index k = 0; k < t.tubes(); ++k) {
    out += k ? ",\n  [" : "\n  [";
    for (Index i = 0; i < t.rows(); ++i) {
      out += i ? ",\n   [" : "\n   [";
      for (Index j = 0; j < t.cols(); ++j) {
        if (j) out += ", ";
        out += "[" + format_double(t(i, j, k).real()) + ", " + format_double(t(i, j, k).imag()) + "]";
      }
      out += "]";
    }
    out += "]";
  }
  out += "\n]}\n";
  return out;
}

Tensor3 read_ttj(const std::filesystem::path& path) { return parse_ttj(read_text(path)); }

void write_ttj(const Tensor3& t, const std::filesystem::path& path) { write_text_atomic(path, format_ttj(t)); }

LtiSystem system_from_json(const json& j) {
  if (!j.is_object()) format_error("system must be a JSON object");
  const json& kind = require_key(j, "kind");
  if (kind == "ss") {
    reject_unknown_keys(j, {"kind", "A", "B", "C", "D"});
    StateSpaceTensor ss{tensor_from_json(require_key(j, "A")), tensor_from_json(require_key(j, "B")),
                        tensor_from_json(require_key(j, "C")), tensor_from_json(require_key(j, "D"))};
    try {
      return LtiSystem(std::move(ss));
    } catch (const Error& e) {
      format_error(e.what());
    }
  }
  if (kind == "rational") {
    reject_unknown_keys(j, {"kind", "slices"});
    const json& slices = require_key(j, "slices");
    if (!slices.is_array() || slices.empty()) format_error("'slices' must be a nonempty array");
    RationalSliceTF tf;
    for (const auto& s : slices) {
      if (!s.is_array()) format_error("each slice must be an array of rows");
      std::vector<std::vector<RationalEntry>> rows;
      for (const auto& r : s) {
        if (!r.is_array()) format_error("each row must be an array of entries");
        std::vector<RationalEntry> row;
        for (const auto& e : r) {
          if (!e.is_object()) format_error("rational entries must be {num, den} objects");
          reject_unknown_keys(e, {"num", "den"});
          row.push_back({read_poly(e, "num"), read_poly(e, "den")});
        }
        rows.push_back(std::move(row));
      }
      tf.slices.push_back(std::move(rows));
    }
    try {
      return LtiSystem(std::move(tf));
    } catch (const Error& e) {
      format_error(e.what());
    }
  }
  format_error("'kind' must be \"ss\" or \"rational\"");
}

json system_to_json(const LtiSystem& sys) {
  if (const auto* ss = std::get_if<StateSpaceTensor>(&sys.repr())) {
    return {{"kind", "ss"},
            {"A", tensor_to_json(ss->A)},
            {"B", tensor_to_json(ss->B)},
            {"C", tensor_to_json(ss->C)},
            {"D", tensor_to_json(ss->D)}};
  }
  const auto& tf = std::get<RationalSliceTF>(sys.repr());
  json slices = json::array();
  for (const auto& s : tf.slices) {
    json rows = json::array();
    for (const auto& r : s) {
      json row = json::array();
      for (const auto& e : r) row.push_back({{"num", e.num}, {"den", e.den}});
      rows.push_back(row);
    }
    slices.push_back(rows);
  }
  return {{"kind", "rational"}, {"slices", slices}};
}

LtiSystem read_tlj(const std::filesystem::path& path) { return system_from_json(parse_json(read_text(path))); }

void write_tlj(const LtiSystem& sys, const std::filesystem::path& path) {
  write_text_atomic(path, system_to_json(sys).dump(2) + "\n");
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::kIo, "cannot open " + tmp.string() + " for writing");
    f << text;
    f.flush();
    if (!f) throw Error(ErrorCode::kIo, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::kIo, "cannot move output into place at " + path.string());
  }
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace tphase::io
