#pragma once

#include <Eigen/Dense>
#include <string>

namespace lsdml {

/// Relative floor below which Gram eigenvalues count as zero.
inline constexpr double kGramClampTol = 1e-10;
/// Relative jitter added to empirical Gram matrices before factorization.
inline constexpr double kEmpiricalJitter = 1e-10;
/// Singular values below this fraction of the largest one are treated as zero.
inline constexpr double kRankCutoff = 1e-10;

/// Ratio of extreme eigenvalues of a symmetric matrix (inf when singular).
double condition_number(const Eigen::MatrixXd& sym);

/// Cholesky factor of a population Gram. Eigenvalues within the clamp band count
/// as zero, so any such direction raises SingularSystem.
Eigen::LLT<Eigen::MatrixXd> factor_gram(const Eigen::MatrixXd& gram, const std::string& what);

/// gram + kEmpiricalJitter * trace/dim * I.
Eigen::MatrixXd jittered(const Eigen::MatrixXd& gram);

/// Factor an empirical Gram after jitter. A design with numerical rank at most one
/// in a space of dimension two or more carries no usable variation and raises
/// SingularSystem; other rank deficits (unobserved support atoms) are absorbed by
/// the jitter.
Eigen::LLT<Eigen::MatrixXd> factor_empirical_gram(const Eigen::MatrixXd& gram, const std::string& what);

/// Solve an SPD system, raising SingularSystem with the condition estimate on failure.
Eigen::VectorXd solve_spd(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const std::string& what);

}  // namespace lsdml
