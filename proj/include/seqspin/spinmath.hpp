#pragma once

// Spin-s matrix machinery: ladder/component operators, the eigenbasis of a
// spin component along an arbitrary axis, and transition probabilities
// between such eigenbases.
//
// Basis convention everywhere: index k runs 0..2s and labels the eigenvalue
// m_k = s - k, i.e. row/column 0 is m = +s and the last one is m = -s.

#include <Eigen/Dense>

#include "seqspin/types.hpp"

namespace seqspin::spinmath {

struct SpinOperators {
  Eigen::MatrixXcd sx, sy, sz, sp, sm;  // sp/sm are the raising/lowering ops
};

// Matrix representations of the spin-s operators in the Sz eigenbasis
// (hbar = 1). <m'|S+|m> = sqrt(s(s+1) - m(m+1)) delta_{m',m+1}, etc.
SpinOperators build_spin_operators(const SpinSystem& sys);

// S . a for a unit direction a.
Eigen::MatrixXcd spin_component(const SpinSystem& sys, const Direction& a);

// Unitary whose column k is the eigenvector |a, m_k> of S . a, built as
// the rotation exp(-i phi Sz) exp(-i theta Sy) acting on the Sz basis.
// Column phases are convention; everything downstream is phase-invariant.
Eigen::MatrixXcd eigenbasis(const SpinSystem& sys, const Direction& a);

// |<a, m_j | b, m_k>|^2. Depends only on the angle between a and b.
double transition_prob(const SpinSystem& sys, const Direction& a, int j,
                       const Direction& b, int k);

// Full transition matrix T(j, k) = |<a, m_j | b, m_k>|^2. Doubly stochastic.
Eigen::MatrixXd transition_matrix(const SpinSystem& sys, const Direction& a,
                                  const Direction& b);

// Same, parameterized by the relative angle directly (a at angle 0, b at
// `angle` in a common plane). This is the quantity the transition matrix
// actually depends on, and the form the closed-form reductions consume.
Eigen::MatrixXd transition_matrix_angle(const SpinSystem& sys, double angle);

}  // namespace seqspin::spinmath
