#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "hsr/common.hpp"

namespace hsr {

struct GridSpec {
  int dim = 2;              // N; the tangential box has N-1 axes
  double half_length = 40;  // tangential box [-a, a) per axis
  int points = 128;         // tangential points per axis, power of two
  double L = 40;            // vertical cutoff
  int nz = 257;             // vertical nodes x_k = k L / (nz - 1)

  void validate() const;
  int taxes() const { return dim - 1; }
  std::size_t tangential_count() const;
  double dx() const { return 2 * half_length / points; }
  double dz() const { return nz > 1 ? L / (nz - 1) : 0.0; }
  // doubled periodic vertical length 2(nz - 1)
  int doubled_nz() const { return 2 * (nz - 1); }
  double coord(int i) const { return -half_length + i * dx(); }
  double z(int k) const { return k * dz(); }
  // angular frequency of FFT index i; 0 at the Nyquist index
  double frequency(int i) const;
  bool is_nyquist(int i) const { return i == points / 2; }
  // FFT index triple -> tangential axis indices
  std::vector<int> unflatten(std::size_t t) const;
  rvec xi_of(std::size_t t) const;
  bool any_nyquist(std::size_t t) const;
  GridSpec trace() const;

  bool operator==(const GridSpec& o) const = default;
};

enum class FieldRole { density, velocity_component, datum };
std::string role_name(FieldRole r);
FieldRole role_from_name(const std::string& s);

// values laid out as [tangential flat index][vertical node]
struct GridField {
  GridSpec spec;
  FieldRole role = FieldRole::datum;
  cvec values;

  static GridField zeros(const GridSpec& s, FieldRole r);
  cd& at(std::size_t t, int k) { return values[t * spec.nz + k]; }
  cd at(std::size_t t, int k) const { return values[t * spec.nz + k]; }
  double max_abs() const;
};

enum class Parity { even, odd };

// same tangential layout with the doubled periodic vertical grid of 2(nz-1) nodes
struct DoubledField {
  GridSpec spec;
  cvec values;
  int m2() const { return spec.doubled_nz(); }
  cd& at(std::size_t t, int j) { return values[t * m2() + j]; }
  cd at(std::size_t t, int j) const { return values[t * m2() + j]; }
};

DoubledField extend(const GridField& f, Parity parity);
GridField restrict_half(const DoubledField& f, FieldRole role);

// FFTW plans over a contiguous block of `howmany` interleaved transforms
class Fft {
 public:
  // rank-d transform of extent dims, applied to `howmany` sequences with stride howmany
  Fft(std::vector<int> dims, int howmany, int stride, int dist);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;
  void forward(cd* data) const;
  // unnormalized inverse
  void backward(cd* data) const;
  std::size_t total() const { return total_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::size_t total_;
};

// tangential transform of a half-space or trace field, in place; inverse divides by the point count
void tangential_forward(const GridSpec& s, int nz, cvec& values);
void tangential_inverse(const GridSpec& s, int nz, cvec& values);

// data decay check at the tangential box faces and the vertical top node
void validate_decay(const GridField& f, double tol, const std::string& name);

// flat binary (interleaved re, im doubles) plus a JSON header at path + ".json"
void write_field(const std::string& path, const GridField& f);
GridField read_field(const std::string& path);

}  // namespace hsr
