#include "hsr/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numbers>
#include <nlohmann/json.hpp>

namespace hsr {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
bool pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }
}  // namespace

void GridSpec::validate() const {
  if (dim < 2 || dim > 4) throw ConfigError("grid dimension N must be 2, 3 or 4");
  if (points < 8 || !pow2(points)) throw ConfigError("tangential points must be a power of two >= 8");
  if (!(half_length > 0)) throw ConfigError("tangential half-length must be positive");
  if (!(L > 0)) throw ConfigError("vertical cutoff L must be positive");
  if (nz < 2) throw ConfigError("at least two vertical nodes required");
}

std::size_t GridSpec::tangential_count() const {
  std::size_t n = 1;
  for (int a = 0; a < taxes(); ++a) n *= static_cast<std::size_t>(points);
  return n;
}

double GridSpec::frequency(int i) const {
  if (is_nyquist(i)) return 0.0;
  const int k = i < points / 2 ? i : i - points;
  return std::numbers::pi * k / half_length;
}

std::vector<int> GridSpec::unflatten(std::size_t t) const {
  std::vector<int> idx(taxes());
  for (int a = taxes() - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(t % points);
    t /= points;
  }
  return idx;
}

rvec GridSpec::xi_of(std::size_t t) const {
  const auto idx = unflatten(t);
  rvec xi(idx.size());
  for (std::size_t a = 0; a < idx.size(); ++a) xi[a] = frequency(idx[a]);
  return xi;
}

bool GridSpec::any_nyquist(std::size_t t) const {
  for (int i : unflatten(t))
    if (is_nyquist(i)) return true;
  return false;
}

GridSpec GridSpec::trace() const {
  GridSpec s = *this;
  s.nz = 1;
  return s;
}

std::string role_name(FieldRole r) {
  switch (r) {
    case FieldRole::density: return "density";
    case FieldRole::velocity_component: return "velocity_component";
    case FieldRole::datum: return "datum";
  }
  return "datum";
}

FieldRole role_from_name(const std::string& s) {
  if (s == "density") return FieldRole::density;
  if (s == "velocity_component") return FieldRole::velocity_component;
  if (s == "datum") return FieldRole::datum;
  throw ConfigError("unknown field role: " + s);
}

GridField GridField::zeros(const GridSpec& s, FieldRole r) {
  GridField f;
  f.spec = s;
  f.role = r;
  f.values.assign(s.tangential_count() * s.nz, 0.0);
  return f;
}

double GridField::max_abs() const {
  double m = 0;
  for (cd v : values) m = std::max(m, std::abs(v));
  return m;
}

DoubledField extend(const GridField& f, Parity parity) {
  if (f.spec.nz < 2) throw UsageError("extension needs a vertical grid");
  DoubledField d;
  d.spec = f.spec;
  const int nz = f.spec.nz, M2 = d.m2();
  const std::size_t T = f.spec.tangential_count();
  d.values.assign(T * M2, 0.0);
  const double sg = parity == Parity::even ? 1.0 : -1.0;
  for (std::size_t t = 0; t < T; ++t) {
    for (int j = 0; j < nz; ++j) d.at(t, j) = f.at(t, j);
    for (int j = nz; j < M2; ++j) d.at(t, j) = sg * f.at(t, M2 - j);
    if (parity == Parity::odd) {
      d.at(t, 0) = 0.0;
      d.at(t, nz - 1) = 0.0;
    }
  }
  return d;
}

GridField restrict_half(const DoubledField& f, FieldRole role) {
  GridField g = GridField::zeros(f.spec, role);
  const std::size_t T = f.spec.tangential_count();
  for (std::size_t t = 0; t < T; ++t)
    for (int k = 0; k < f.spec.nz; ++k) g.at(t, k) = f.at(t, k);
  return g;
}

struct Fft::Impl {
  fftw_plan fwd = nullptr, bwd = nullptr;
};

Fft::Fft(std::vector<int> dims, int howmany, int stride, int dist) : impl_(std::make_unique<Impl>()) {
  std::size_t n = 1;
  for (int d : dims) n *= static_cast<std::size_t>(d);
  total_ = n * howmany;
  std::vector<fftw_complex> scratch(total_);
  std::lock_guard<std::mutex> lock(planner_mutex());
  const int rank = static_cast<int>(dims.size());
  impl_->fwd = fftw_plan_many_dft(rank, dims.data(), howmany, scratch.data(), nullptr, stride, dist,
                                  scratch.data(), nullptr, stride, dist, FFTW_FORWARD, FFTW_ESTIMATE);
  impl_->bwd = fftw_plan_many_dft(rank, dims.data(), howmany, scratch.data(), nullptr, stride, dist,
                                  scratch.data(), nullptr, stride, dist, FFTW_BACKWARD, FFTW_ESTIMATE);
  if (!impl_->fwd || !impl_->bwd) throw ConfigError("FFTW planning failed");
}

Fft::~Fft() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (impl_->fwd) fftw_destroy_plan(impl_->fwd);
  if (impl_->bwd) fftw_destroy_plan(impl_->bwd);
}

void Fft::forward(cd* data) const {
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(impl_->fwd, p, p);
}

void Fft::backward(cd* data) const {
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(impl_->bwd, p, p);
}

void tangential_forward(const GridSpec& s, int nz, cvec& values) {
  const Fft f(std::vector<int>(s.taxes(), s.points), nz, nz, 1);
  if (values.size() != f.total()) throw UsageError("field size does not match the grid");
  f.forward(values.data());
}

void tangential_inverse(const GridSpec& s, int nz, cvec& values) {
  const Fft f(std::vector<int>(s.taxes(), s.points), nz, nz, 1);
  if (values.size() != f.total()) throw UsageError("field size does not match the grid");
  f.backward(values.data());
  const double sc = 1.0 / static_cast<double>(s.tangential_count());
  for (cd& v : values) v *= sc;
}

void validate_decay(const GridField& f, double tol, const std::string& name) {
  const double mx = f.max_abs();
  if (mx == 0) return;
  const std::size_t T = f.spec.tangential_count();
  double edge = 0;
  for (std::size_t t = 0; t < T; ++t) {
    const auto idx = f.spec.unflatten(t);
    const bool face = std::any_of(idx.begin(), idx.end(), [](int i) { return i == 0; });
    for (int k = 0; k < f.spec.nz; ++k)
      if (face || (f.spec.nz > 1 && k == f.spec.nz - 1)) edge = std::max(edge, std::abs(f.at(t, k)));
  }
  if (edge > tol * mx)
    throw ConfigError("data '" + name + "' has not decayed at the box edge (ratio " +
                      std::to_string(edge / mx) + "); enlarge the box or L");
}

void write_field(const std::string& path, const GridField& f) {
  nlohmann::json h;
  h["dim"] = f.spec.dim;
  h["half_length"] = f.spec.half_length;
  h["points"] = f.spec.points;
  h["L"] = f.spec.L;
  h["nz"] = f.spec.nz;
  h["dx"] = f.spec.dx();
  h["dz"] = f.spec.dz();
  h["role"] = role_name(f.role);
  h["layout"] = "row-major [tangential axes..., vertical], complex128 interleaved re/im, little endian";
  h["binary"] = path;
  std::ofstream hj(path + ".json");
  if (!hj) throw ConfigError("cannot write " + path + ".json");
  hj << h.dump(2) << "\n";
  std::ofstream b(path, std::ios::binary);
  if (!b) throw ConfigError("cannot write " + path);
  b.write(reinterpret_cast<const char*>(f.values.data()),
          static_cast<std::streamsize>(f.values.size() * sizeof(cd)));
}

GridField read_field(const std::string& path) {
  std::ifstream hj(path + ".json");
  if (!hj) throw ConfigError("missing header " + path + ".json");
  nlohmann::json h;
  try {
    hj >> h;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("malformed field header: ") + e.what());
  }
  GridField f;
  f.spec.dim = h.at("dim").get<int>();
  f.spec.half_length = h.at("half_length").get<double>();
  f.spec.points = h.at("points").get<int>();
  f.spec.L = h.at("L").get<double>();
  f.spec.nz = h.at("nz").get<int>();
  f.role = role_from_name(h.value("role", std::string("datum")));
  if (f.spec.nz > 1) f.spec.validate();
  f.values.resize(f.spec.tangential_count() * f.spec.nz);
  if (h.value("format", std::string("binary")) == "csv") {
    // one "re,im" row per value in the binary layout order
    std::ifstream c(path);
    if (!c) throw ConfigError("missing csv " + path);
    std::string line;
    std::size_t i = 0;
    while (std::getline(c, line)) {
      if (line.empty() || line[0] == '#') continue;
      if (i >= f.values.size()) throw ConfigError("csv field " + path + " has extra rows");
      const auto comma = line.find(',');
      try {
        const double re = std::stod(line.substr(0, comma));
        const double im = comma == std::string::npos ? 0.0 : std::stod(line.substr(comma + 1));
        f.values[i++] = cd(re, im);
      } catch (const std::exception&) {
        throw ConfigError("malformed csv row in " + path + ": " + line);
      }
    }
    if (i != f.values.size()) throw ConfigError("csv field " + path + " is truncated");
    return f;
  }
  std::ifstream b(path, std::ios::binary);
  if (!b) throw ConfigError("missing binary " + path);
  b.read(reinterpret_cast<char*>(f.values.data()), static_cast<std::streamsize>(f.values.size() * sizeof(cd)));
  if (b.gcount() != static_cast<std::streamsize>(f.values.size() * sizeof(cd)))
    throw ConfigError("binary field " + path + " is truncated");
  return f;
}

}  // namespace hsr
