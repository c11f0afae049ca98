#include "hsr/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

namespace hsr {

namespace {

std::string strip(const std::string& s) {
  std::string r;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) r += c;
  return r;
}

double parse_real(const std::string& s) {
  double v = 0;
  const char* b = s.data();
  const char* e = b + s.size();
  if (!s.empty() && *b == '+') ++b;
  const auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e || b == e) throw UsageError("not a number: '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

cd parse_complex(const std::string& raw) {
  std::string s = strip(raw);
  if (s.empty()) throw UsageError("empty complex number");
  if (s.front() == '(' && s.back() == ')') {
    const auto parts = split(s.substr(1, s.size() - 2), ',');
    if (parts.size() != 2) throw UsageError("expected (re,im): '" + raw + "'");
    return {parse_real(parts[0]), parse_real(parts[1])};
  }
  if (s.back() != 'i' && s.back() != 'j') return {parse_real(s), 0.0};
  s.pop_back();
  // split at the last sign that is not an exponent sign
  std::size_t cut = std::string::npos;
  for (std::size_t k = s.size(); k-- > 1;)
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      cut = k;
      break;
    }
  const std::string re = cut == std::string::npos ? "" : s.substr(0, cut);
  std::string im = cut == std::string::npos ? s : s.substr(cut);
  if (im.empty() || im == "+") im = "1";
  if (im == "-") im = "-1";
  return {re.empty() ? 0.0 : parse_real(re), parse_real(im)};
}

rvec parse_real_list(const std::string& s) {
  rvec out;
  for (const auto& p : split(strip(s), ',')) out.push_back(parse_real(p));
  return out;
}

cvec parse_complex_list(const std::string& s) {
  cvec out;
  if (strip(s).empty()) return out;
  // commas inside parentheses belong to a single value
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(parse_complex(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(parse_complex(cur));
  return out;
}

ParamTriple read_params_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open parameter file " + path);
  ParamTriple p;
  bool seen[3] = {false, false, false};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = strip(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(path + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = line.substr(0, eq);
    const double v = parse_real(line.substr(eq + 1));
    if (key == "mu") p.mu = v, seen[0] = true;
    else if (key == "nu") p.nu = v, seen[1] = true;
    else if (key == "kappa") p.kappa = v, seen[2] = true;
    else throw UsageError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  if (!seen[0] || !seen[1] || !seen[2]) throw UsageError(path + ": mu, nu and kappa are all required");
  return p;
}

ParamTriple parse_params(const std::string& arg) {
  if (std::filesystem::is_regular_file(arg)) return read_params_file(arg);
  const rvec v = parse_real_list(arg);
  if (v.size() != 3) throw UsageError("--params expects mu,nu,kappa or a parameter file");
  return {v[0], v[1], v[2]};
}

ScanGrid parse_scan_grid(const std::string& s) {
  double xlo = 1e-2, xhi = 1e2, llo = 1e-2, lhi = 1e2, arg = 1.4;
  int nx = 40, nl = 40, na = 5, dim = 2;
  if (!strip(s).empty()) {
    for (const auto& kv : split(strip(s), ',')) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw UsageError("grid entry '" + kv + "' is not key=value");
      const std::string k = kv.substr(0, eq), v = kv.substr(eq + 1);
      auto range = [&](double& lo, double& hi) {
        const auto c = v.find(':');
        if (c == std::string::npos) throw UsageError("grid range '" + kv + "' needs lo:hi");
        lo = parse_real(v.substr(0, c));
        hi = parse_real(v.substr(c + 1));
      };
      if (k == "xi") range(xlo, xhi);
      else if (k == "lambda") range(llo, lhi);
      else if (k == "nx") nx = static_cast<int>(parse_real(v));
      else if (k == "nl") nl = static_cast<int>(parse_real(v));
      else if (k == "na") na = static_cast<int>(parse_real(v));
      else if (k == "arg") arg = parse_real(v);
      else if (k == "dim") dim = static_cast<int>(parse_real(v));
      else throw UsageError("unknown grid key '" + k + "'");
    }
  }
  ScanGrid g = ScanGrid::log_grid(xlo, xhi, nx, llo, lhi, nl, na, arg, dim);
  g.validate();
  return g;
}

std::string fmt(double x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

CsvWriter::CsvWriter(std::ostream& os, std::vector<std::string> header) : os_(os), columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) os_ << (i ? "," : "") << header[i];
  os_ << "\n";
}

CsvWriter& CsvWriter::add(const std::string& s) {
  row_.push_back(s);
  return *this;
}
CsvWriter& CsvWriter::add(double x) { return add(fmt(x)); }
CsvWriter& CsvWriter::add(int x) { return add(std::to_string(x)); }
CsvWriter& CsvWriter::add(cd z) { return add(z.real()).add(z.imag()); }

void CsvWriter::end_row() {
  if (row_.size() != columns_) throw UsageError("csv row has the wrong number of columns");
  for (std::size_t i = 0; i < row_.size(); ++i) os_ << (i ? "," : "") << row_[i];
  os_ << "\n";
  row_.clear();
}

nlohmann::json complex_json(cd z) { return nlohmann::json{{"re", z.real()}, {"im", z.imag()}}; }

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot hash " + path);
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  std::string hex;
  char h[3];
  for (unsigned i = 0; i < len; ++i) {
    std::snprintf(h, sizeof h, "%02x", md[i]);
    hex += h;
  }
  return hex;
}

void RunManifest::add_input(const std::string& path) { input_hashes[path] = sha256_file(path); }

nlohmann::json RunManifest::to_json() const {
  nlohmann::json j;
  j["subcommand"] = subcommand;
  j["config"] = config;
  j["inputs"] = input_hashes;
  j["outputs"] = outputs;
  return j;
}

void RunManifest::write(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write manifest " + path);
  out << to_json().dump(2) << "\n";
}

}  // namespace hsr
