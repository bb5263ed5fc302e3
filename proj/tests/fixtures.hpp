// Worked examples shared by unit and acceptance tests.
#pragma once

#include <complex>
#include <vector>

#include "tphase/lti.hpp"
#include "tphase/random.hpp"
#include "tphase/tensor.hpp"

namespace fixture {

using tphase::CMatrix;
using tphase::Complex;
using tphase::Index;
using tphase::Tensor3;

// n x n x p tensor whose Fourier slices are diag(exp(i phases[k])).
inline Tensor3 diagonal_fourier_tensor(const std::vector<std::vector<double>>& phases) {
  std::vector<CMatrix> slices;
  for (const auto& ph : phases) {
    CMatrix d = CMatrix::Zero(static_cast<Index>(ph.size()), static_cast<Index>(ph.size()));
    for (std::size_t i = 0; i < ph.size(); ++i) d(static_cast<Index>(i), static_cast<Index>(i)) = std::polar(1.0, ph[i]);
    slices.push_back(d);
  }
  return tphase::tensor_from_fourier(slices);
}

// The low T-phase-rank example: slices diag(e^{0.6j}, e^{0.2j}),
// diag(e^{0.4j}, e^{0.1j}), diag(e^{0.3j}, e^{0.05j}).
inline Tensor3 phase_rank_example() {
  return diagonal_fourier_tensor({{0.6, 0.2}, {0.4, 0.1}, {0.3, 0.05}});
}

inline tphase::RationalEntry ratio(tphase::Polynomial num, tphase::Polynomial den) { return {std::move(num), std::move(den)}; }

// The 2 x 2 x 2 Bode example, frontal slices G^(1), G^(2) over s^2 + 2s + 2.
inline tphase::LtiSystem bode_example() {
  const tphase::Polynomial den{1.0, 2.0, 2.0};
  tphase::RationalSliceTF tf;
  tf.slices = {
      {{ratio({2.0, 3.0, 4.0}, den), ratio({0.5, 1.0, 1.0}, den)},
       {ratio({0.5, 1.0, 1.0}, den), ratio({1.5, 2.0, 3.0}, den)}},
      {{ratio({0.8, 1.0, 1.0}, den), ratio({0.2, 0.5, 0.2}, den)},
       {ratio({0.2, 0.5, 0.2}, den), ratio({0.9, 1.2, 1.0}, den)}},
  };
  return tphase::LtiSystem(tf);
}

// 1 x 1 x 1 rational system num(s) / den(s).
inline tphase::LtiSystem scalar_system(tphase::Polynomial num, tphase::Polynomial den) {
  tphase::RationalSliceTF tf;
  tf.slices = {{{ratio(std::move(num), std::move(den))}}};
  return tphase::LtiSystem(tf);
}

inline Tensor3 scalar_tensor(Complex v) {
  Tensor3 t(1, 1, 1);
  t(0, 0, 0) = v;
  return t;
}

inline tphase::LtiSystem static_scaled_identity(double c, Index m, Index p) {
  return tphase::LtiSystem::static_gain(Tensor3::identity(m, p) * Complex(c));
}

}  // namespace fixture
