#include "toda/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

namespace toda::io {

namespace {

[[noreturn]] void fail(std::string_view what, std::string_view field) {
  std::ostringstream os;
  os << what << ": field '" << field << "'";
  throw SchemaError(os.str());
}

void check_object(const json& j, std::string_view what) {
  if (!j.is_object()) throw SchemaError(std::string(what) + ": expected a JSON object");
  if (j.contains("schema_version")) {
    const auto& v = j.at("schema_version");
    if (!v.is_number_integer() || v.get<int>() != kSchemaVersion)
      fail(what, "schema_version (unsupported)");
  }
}

const json& field(const json& j, std::string_view what, const char* key) {
  if (!j.contains(key)) fail(what, std::string(key) + " (missing)");
  return j.at(key);
}

double number(const json& j, std::string_view what, const char* key) {
  const json& v = field(j, what, key);
  if (!v.is_number()) fail(what, std::string(key) + " (expected a number)");
  return v.get<double>();
}

int integer(const json& j, std::string_view what, const char* key) {
  const json& v = field(j, what, key);
  if (!v.is_number_integer()) fail(what, std::string(key) + " (expected an integer)");
  return v.get<int>();
}

std::vector<double> numbers(const json& j, std::string_view what, const char* key) {
  const json& v = field(j, what, key);
  if (!v.is_array()) fail(what, std::string(key) + " (expected an array)");
  std::vector<double> out;
  out.reserve(v.size());
  for (const json& e : v) {
    if (!e.is_number()) fail(what, std::string(key) + " (expected numbers)");
    out.push_back(e.get<double>());
  }
  return out;
}

json complex_array(const std::vector<cplx>& v) {
  json out = json::array();
  for (const cplx& z : v) out.push_back({z.real(), z.imag()});
  return out;
}

std::vector<cplx> complex_array(const json& j, std::string_view what, const char* key) {
  const json& v = field(j, what, key);
  if (!v.is_array()) fail(what, std::string(key) + " (expected an array)");
  std::vector<cplx> out;
  for (const json& e : v) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      fail(what, std::string(key) + " (expected [re, im] pairs)");
    out.emplace_back(e[0].get<double>(), e[1].get<double>());
  }
  return out;
}

json rows_json(const std::vector<SuperfastRow>& rows) {
  json out = json::array();
  for (const auto& r : rows)
    out.push_back({{"M", r.M}, {"tail_sum", r.tail_sum}, {"bound", r.bound},
                   {"satisfied", r.satisfied}});
  return out;
}

}  // namespace

json to_json(const LatticeState& s) {
  return {{"schema_version", kSchemaVersion},
          {"n_min", s.n_min()},
          {"a", std::vector<double>(s.a_values().begin(), s.a_values().end())},
          {"b", std::vector<double>(s.b_values().begin(), s.b_values().end())},
          {"a0", s.a0()},
          {"b0", s.b0()},
          {"t", s.t()}};
}

LatticeState lattice_state_from_json(const json& j) {
  constexpr std::string_view what = "lattice state";
  check_object(j, what);
  const int n_min = integer(j, what, "n_min");
  auto a = numbers(j, what, "a");
  auto b = numbers(j, what, "b");
  const double a0 = number(j, what, "a0");
  const double b0 = number(j, what, "b0");
  const double t = j.contains("t") ? number(j, what, "t") : 0.0;
  if (a.empty() || a.size() != b.size()) fail(what, "a/b (equal nonzero lengths required)");
  try {
    return LatticeState(n_min, std::move(a), std::move(b), a0, b0, t);
  } catch (const InvalidState& e) {
    throw SchemaError(std::string("lattice state: ") + e.what());
  }
}

json to_json(const KvMState& s) {
  return {{"schema_version", kSchemaVersion},
          {"n_min", s.n_min()},
          {"rho", std::vector<double>(s.rho_values().begin(), s.rho_values().end())},
          {"rho0", s.rho0()},
          {"t", s.t()}};
}

KvMState kvm_state_from_json(const json& j) {
  constexpr std::string_view what = "KvM state";
  check_object(j, what);
  const int n_min = integer(j, what, "n_min");
  auto rho = numbers(j, what, "rho");
  const double rho0 = number(j, what, "rho0");
  const double t = j.contains("t") ? number(j, what, "t") : 0.0;
  try {
    return KvMState(n_min, std::move(rho), rho0, t);
  } catch (const InvalidState& e) {
    throw SchemaError(std::string("KvM state: ") + e.what());
  }
}

json to_json(const HierarchyCoeffs& c) {
  return {{"schema_version", kSchemaVersion},
          {"r", c.r()},
          {"c", std::vector<double>(c.c().begin(), c.c().end())}};
}

HierarchyCoeffs coeffs_from_json(const json& j) {
  constexpr std::string_view what = "hierarchy coefficients";
  check_object(j, what);
  const int r = integer(j, what, "r");
  auto c = numbers(j, what, "c");
  try {
    return HierarchyCoeffs(r, std::move(c));
  } catch (const InvalidState& e) {
    throw SchemaError(std::string("hierarchy coefficients: ") + e.what());
  }
}

json to_json(const ScatteringData& sd) {
  json bs = json::array();
  for (const auto& b : sd.bound_states)
    bs.push_back({{"k", b.k},
                  {"lambda", b.lambda},
                  {"gamma_plus", b.gamma_plus},
                  {"gamma_minus", b.gamma_minus}});
  return {{"schema_version", kSchemaVersion},
          {"t", sd.t},
          {"k_grid", complex_array(sd.k_grid)},
          {"R_plus", complex_array(sd.R_plus)},
          {"R_minus", complex_array(sd.R_minus)},
          {"bound_states", bs}};
}

ScatteringData scattering_from_json(const json& j) {
  constexpr std::string_view what = "scattering data";
  check_object(j, what);
  ScatteringData sd;
  sd.t = number(j, what, "t");
  sd.k_grid = complex_array(j, what, "k_grid");
  sd.R_plus = complex_array(j, what, "R_plus");
  sd.R_minus = complex_array(j, what, "R_minus");
  if (sd.R_plus.size() != sd.k_grid.size() || sd.R_minus.size() != sd.k_grid.size())
    fail(what, "R_plus/R_minus (length must match k_grid)");
  const json& bs = field(j, what, "bound_states");
  if (!bs.is_array()) fail(what, "bound_states (expected an array)");
  for (const json& e : bs) {
    check_object(e, "bound state");
    BoundState b;
    b.k = number(e, "bound state", "k");
    b.lambda = number(e, "bound state", "lambda");
    b.gamma_plus = number(e, "bound state", "gamma_plus");
    b.gamma_minus = number(e, "bound state", "gamma_minus");
    sd.bound_states.push_back(b);
  }
  return sd;
}

json to_json(const DispersionLaw& law, double residual) {
  json d = json::object();
  for (int j = -(law.r() + 1); j <= law.r() + 1; ++j) d[std::to_string(j)] = law.d(j);
  return {{"schema_version", kSchemaVersion},
          {"r", law.r()},
          {"d", d},
          {"residual", residual}};
}

DispersionLaw dispersion_from_json(const json& j) {
  constexpr std::string_view what = "dispersion law";
  check_object(j, what);
  const int r = integer(j, what, "r");
  if (r < 0) fail(what, "r (must be nonnegative)");
  const json& d = field(j, what, "d");
  if (!d.is_object()) fail(what, "d (expected an object)");
  std::vector<double> coeffs;
  for (int k = -(r + 1); k <= r + 1; ++k) {
    const std::string key = std::to_string(k);
    if (!d.contains(key) || !d.at(key).is_number()) fail(what, "d." + key);
    coeffs.push_back(d.at(key).get<double>());
  }
  return DispersionLaw(r, std::move(coeffs));
}

json to_json(const DecayReport& rep) {
  return {{"t", rep.t},
          {"records", rows_json(rep.rows)},
          {"first_moment", rep.first_moment},
          {"fitted_class", to_string(rep.fitted_class)},
          {"superfast", rep.superfast}};
}

json to_json(const WitnessResult& res) {
  return {{"schema_version", kSchemaVersion},
          {"M_range", {res.M_lo, res.M_hi}},
          {"t0", to_json(res.at_t0)},
          {"t1", to_json(res.at_t1)},
          {"verdict", to_string(res.verdict)},
          {"verdict_text", res.text}};
}

json to_json(const GrowthReport& rep) {
  json rows = json::array();
  for (const auto& r : rep.rows)
    rows.push_back({{"x", r.x}, {"rate_minus", r.rate_minus}, {"rate_plus", r.rate_plus}});
  return {{"schema_version", kSchemaVersion},
          {"r", rep.r},
          {"trivial", rep.trivial},
          {"factor", rep.forward_factor ? "forward" : "backward"},
          {"growth_detected", rep.growth_detected},
          {"max_abs_reflection", rep.max_abs_reflection},
          {"rows", rows},
          {"verdict", rep.verdict}};
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error("write failed for " + path.string());
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256 failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

}  // namespace toda::io
