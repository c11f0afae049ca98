#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hsr/common.hpp"
#include "hsr/scan_grid.hpp"
#include "hsr/spectral_core.hpp"

namespace hsr {

// "1.5", "2i", "-i", "0.3-2e-3i", "(1,2)"
cd parse_complex(const std::string& s);
rvec parse_real_list(const std::string& s);
cvec parse_complex_list(const std::string& s);

struct ParamTriple {
  double mu = 1, nu = 1, kappa = 1;
};

// "mu,nu,kappa" or a path to a key = value file with keys mu, nu, kappa
ParamTriple parse_params(const std::string& arg);
ParamTriple read_params_file(const std::string& path);

// comma list of key=value: xi=lo:hi, nx, lambda=lo:hi, nl, na, arg, dim
ScanGrid parse_scan_grid(const std::string& s);

// round-trip decimal text
std::string fmt(double x);

class CsvWriter {
 public:
  CsvWriter(std::ostream& os, std::vector<std::string> header);
  CsvWriter& add(const std::string& s);
  CsvWriter& add(double x);
  CsvWriter& add(int x);
  // complex values take a re and an im column
  CsvWriter& add(cd z);
  void end_row();

 private:
  std::ostream& os_;
  std::size_t columns_;
  std::vector<std::string> row_;
};

nlohmann::json complex_json(cd z);

std::string sha256_file(const std::string& path);

struct RunManifest {
  std::string subcommand;
  nlohmann::json config;
  std::map<std::string, std::string> input_hashes;
  std::vector<std::string> outputs;

  void add_input(const std::string& path);
  nlohmann::json to_json() const;
  void write(const std::string& path) const;
};

}  // namespace hsr
