#pragma once

#include <string>
#include <variant>
#include <vector>

#include "rsr/fms.hpp"
#include "rsr/geometry.hpp"
#include "rsr/objective.hpp"

namespace rsr {

/// Mean-centered PCA: offset is the unweighted mean, direction the top-d
/// eigenspace of the centered scatter.
struct CenteredPcaInit {};
using AffineInit = std::variant<CenteredPcaInit, AffineSubspace>;

struct AfmsResult {
  AffineSubspace affine;
  IterationTrace trace;
  int iterations = 0;
  std::vector<AffineSubspace> iterates;  // when record_iterates
};

/// T^(a)_eps(A) = (L, m): m is the mean of the points under weights
/// 1 / max(dist(x, A), eps) and L the top-d eigenspace of the weighted scatter
/// about m.
AffineSubspace afms_step(const DataSet& data, const AffineSubspace& current, double eps,
                         std::vector<std::string>* warnings = nullptr);

/// AFMS / AFMS-DS. Uses the FMS stopping rule, with the move between iterates
/// measured as max(||P_k - P_{k-1}||_2, ||Q_{L_k}(m_k - m_{k-1})|| / (1 + ||m_k||)).
/// Trace errors are affine_rep_distance(A^(k), truth). Steps are safeguarded as in
/// solve_fms.
AfmsResult solve_afms(const DataSet& data, Eigen::Index d, const AffineInit& init,
                      const SolverConfig& config, const AffineSubspace* truth = nullptr);

}  // namespace rsr
