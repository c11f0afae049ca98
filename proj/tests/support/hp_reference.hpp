#pragma once

// 50-digit evaluation of the raw (cancellation-prone) symbol forms, used as test oracles

#include <boost/multiprecision/cpp_complex.hpp>

#include "hsr/spectral_core.hpp"

namespace hpref {

using hp = boost::multiprecision::cpp_complex_50;
using hr = boost::multiprecision::cpp_bin_float_50;

inline hp H(hsr::cd z) { return hp(z.real(), z.imag()); }
inline hsr::cd D(const hp& z) { return {static_cast<double>(z.real()), static_cast<double>(z.imag())}; }

struct Point {
  hp s1, s2, t1, t2, w, lam;
  hr xi2, mu, nu, kappa;

  Point(const hsr::FluidParams& p, const hsr::rvec& xi, hsr::cd lambda) {
    mu = p.mu;
    nu = p.nu;
    kappa = p.kappa;
    xi2 = 0;
    for (double x : xi) xi2 += hr(x) * hr(x);
    lam = H(lambda);
    // kappa s^2 - (mu + nu) s + 1 = 0
    const hp disc = sqrt(hp((mu + nu) * (mu + nu) - 4 * kappa));
    const hp a = ((mu + nu) - disc) / (2 * kappa), b = ((mu + nu) + disc) / (2 * kappa);
    // keep the library's labelling of the two roots
    if (std::abs(D(a) - p.s1) <= std::abs(D(b) - p.s1)) {
      s1 = a;
      s2 = b;
    } else {
      s1 = b;
      s2 = a;
    }
    t1 = sqrt(hp(xi2) + s1 * lam);
    t2 = sqrt(hp(xi2) + s2 * lam);
    w = sqrt(hp(xi2) + lam / hp(mu));
  }

  hp m_raw(int k) const {
    const hp t = k == 1 ? t1 : t2, x2(xi2);
    const hp curly = t1 * t2 * w * (t2 + t1) - x2 * (t2 * t2 + t1 * t2 + t1 * t1 - x2);
    return t * (t + w) * curly / lam;
  }
  hp n_raw(int k) const {
    const hp x2(xi2);
    if (k == 1) return (t2 + w) * (-t1 * (t2 * w - x2)) / lam;
    return (t1 + w) * (t2 * (t1 * w - x2)) / lam;
  }
  hp detL_raw() const {
    const hp x2(xi2);
    const hp a = t1 * t1 - x2, b = t2 * t2 - x2;
    const hp c = -t2 * (t1 * w - x2), d = -t1 * (t2 * w - x2);
    return a * d - b * c;
  }
  // Case IV boundary determinant from its four entries
  hp detM_raw() const {
    const hp t = t2, x2(xi2), m(mu), n(nu);
    const hp a = hp(-2) * m * (t - w) * (t + w);
    const hp b = hp(-2) * (n - m) * t;
    const hp c = (t - w) * (hp(2) * m * w * (t + w) + (n - m) * x2);
    const hp d = (n - m) * x2;
    return a * d - b * c;
  }
};

}  // namespace hpref
