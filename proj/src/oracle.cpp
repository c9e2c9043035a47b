#include "lsdml/oracle.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include "lsdml/errors.hpp"
#include "lsdml/linalg.hpp"

namespace lsdml {

OperatorMatrix::OperatorMatrix(BasisSpec hspace, BasisSpec gspace, Eigen::MatrixXd cross,
                               GramMatrix gram_h, GramMatrix gram_g)
    : cross_(std::move(cross)), gram_h_(std::move(gram_h)), gram_g_(std::move(gram_g)) {
  if (!(gram_h_.space == hspace) || !(gram_g_.space == gspace))
    throw DimensionMismatch("operator Grams do not match the supplied spaces");
  if (hspace.domain() != Domain::X || gspace.domain() != Domain::Z)
    throw DimensionMismatch("operator maps an X-domain space into a Z-domain space");
  if (cross_.rows() != gspace.dimension() || cross_.cols() != hspace.dimension())
    throw DimensionMismatch("cross-moment matrix must be dim G x dim H");

  const auto llt_h = factor_gram(gram_h_.matrix, "build_operator (H Gram)");
  const auto llt_g = factor_gram(gram_g_.matrix, "build_operator (G Gram)");
  chol_h_ = llt_h.matrixL();
  chol_g_ = llt_g.matrixL();
  t_ = llt_g.solve(cross_);
  t_adj_ = llt_h.solve(cross_.transpose());

  const Eigen::MatrixXd left = chol_g_.triangularView<Eigen::Lower>().solve(cross_);
  whitened_ = chol_h_.triangularView<Eigen::Lower>().solve(left.transpose()).transpose();

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(whitened_, Eigen::ComputeFullU | Eigen::ComputeFullV);
  u_ = svd.matrixU();
  v_ = svd.matrixV();
  s_ = svd.singularValues();
  const double top = s_.size() > 0 ? s_[0] : 0.0;
  rank_ = 0;
  for (Eigen::Index i = 0; i < s_.size(); ++i)
    if (s_[i] > kRankCutoff * top) ++rank_;
}

CoefVector OperatorMatrix::apply(const CoefVector& h) const {
  if (!(h.space() == hspace())) throw DimensionMismatch("T applied to a function outside H");
  return CoefVector(gspace(), t_ * h.coefficients());
}

CoefVector OperatorMatrix::apply_adjoint(const CoefVector& g) const {
  if (!(g.space() == gspace())) throw DimensionMismatch("T* applied to a function outside G");
  return CoefVector(hspace(), t_adj_ * g.coefficients());
}

Eigen::VectorXd OperatorMatrix::whiten_h(const Eigen::VectorXd& theta) const {
  return chol_h_.transpose() * theta;
}
Eigen::VectorXd OperatorMatrix::unwhiten_h(const Eigen::VectorXd& u) const {
  return chol_h_.transpose().triangularView<Eigen::Upper>().solve(u);
}
Eigen::VectorXd OperatorMatrix::whiten_g(const Eigen::VectorXd& gamma) const {
  return chol_g_.transpose() * gamma;
}
Eigen::VectorXd OperatorMatrix::unwhiten_g(const Eigen::VectorXd& u) const {
  return chol_g_.transpose().triangularView<Eigen::Upper>().solve(u);
}

Eigen::MatrixXd OperatorMatrix::whitened_pinv() const {
  const Eigen::MatrixXd vk = v_.leftCols(rank_);
  const Eigen::MatrixXd uk = u_.leftCols(rank_);
  const Eigen::VectorXd inv = s_.head(rank_).cwiseInverse();
  return vk * inv.asDiagonal() * uk.transpose();
}

OperatorMatrix build_operator(const JointPMF& pmf, const BasisSpec& hspace, const BasisSpec& gspace) {
  if (hspace.domain() != Domain::X || gspace.domain() != Domain::Z)
    throw DimensionMismatch("build_operator needs an X-domain hspace and a Z-domain gspace");
  GramMatrix gh = gram(hspace, pmf);
  GramMatrix gg = gram(gspace, pmf);
  const Eigen::MatrixXd dx = design_matrix(hspace, pmf.x_support());
  const Eigen::MatrixXd dz = design_matrix(gspace, pmf.z_support());
  Eigen::MatrixXd cross = dz.transpose() * pmf.prob().transpose() * dx;
  return OperatorMatrix(hspace, gspace, std::move(cross), std::move(gh), std::move(gg));
}

NuisanceTuple OracleSolution::nuisances() const {
  return {h_dag, g_dag, alpha_h_dag, alpha_g_dag, xi_h, xi_g, xi_alpha_h, xi_alpha_g, r_P, a_P};
}

OracleSolution solve_oracle(const OperatorMatrix& op, const JointPMF& pmf, const FunctionalPair& fp) {
  const BasisSpec& hs = op.hspace();
  const BasisSpec& gs = op.gspace();
  const CoefVector r = population_riesz(fp, pmf, gs);
  const CoefVector a = population_riesz(fp, pmf, hs);

  const int k = op.rank();
  const Eigen::MatrixXd uk = op.left_singular().leftCols(k);
  const Eigen::MatrixXd vk = op.right_singular().leftCols(k);
  const Eigen::MatrixXd& w = op.whitened();
  const Eigen::MatrixXd pinv = op.whitened_pinv();

  const Eigen::VectorXd rt = op.whiten_g(r.coefficients());
  const Eigen::VectorXd at = op.whiten_h(a.coefficients());
  const Eigen::VectorXd rt_par = uk * (uk.transpose() * rt);
  const Eigen::VectorXd at_par = vk * (vk.transpose() * at);

  const Eigen::VectorXd ht = pinv * rt;
  const Eigen::VectorXd gt = pinv.transpose() * at;
  const Eigen::VectorXd aht = pinv * gt;
  const Eigen::VectorXd agt = pinv.transpose() * ht;

  auto on_h = [&](const Eigen::VectorXd& u) { return CoefVector(hs, op.unwhiten_h(u)); };
  auto on_g = [&](const Eigen::VectorXd& u) { return CoefVector(gs, op.unwhiten_g(u)); };

  const CoefVector h_dag = on_h(ht);
  const CoefVector g_dag = on_g(gt);
  const CoefVector alpha_h = on_h(aht);
  const CoefVector alpha_g = on_g(agt);

  OracleSolution sol{
      .h_dag = h_dag,
      .alpha_h_dag = alpha_h,
      .g_dag = g_dag,
      .alpha_g_dag = alpha_g,
      .r_P = r,
      .r_parallel = on_g(rt_par),
      .r_perp = on_g(rt - rt_par),
      .xi_h = op.apply(h_dag),
      .xi_alpha_h = op.apply(alpha_h),
      .a_P = a,
      .a_parallel = on_h(at_par),
      .a_perp = on_h(at - at_par),
      .xi_g = op.apply_adjoint(g_dag),
      .xi_alpha_g = op.apply_adjoint(alpha_g),
      .psi = gt.dot(w * ht),
      .kernel_H = {},
      .kernel_G = {},
      .rank = k,
      .singular_values = op.singular_values(),
  };
  for (Eigen::Index j = k; j < op.right_singular().cols(); ++j)
    sol.kernel_H.push_back(on_h(op.right_singular().col(j)));
  for (Eigen::Index j = k; j < op.left_singular().cols(); ++j)
    sol.kernel_G.push_back(on_g(op.left_singular().col(j)));

  sol.alpha_h_residual = (w * aht - gt).norm();
  sol.alpha_g_residual = (w.transpose() * agt - ht).norm();
  sol.source_condition_violated = sol.alpha_h_residual > 1e-8 || sol.alpha_g_residual > 1e-8;
  return sol;
}

std::vector<CoefVector> tikhonov_path(const OperatorMatrix& op, const CoefVector& target,
                                      std::span<const double> lambdas, TikhonovSide side) {
  const bool primal = side == TikhonovSide::Primal || side == TikhonovSide::WeakRieszPrimal;
  const BasisSpec& in_space = primal ? op.gspace() : op.hspace();
  if (!(target.space() == in_space))
    throw DimensionMismatch(std::string("tikhonov_path: target must be over ") +
                            (primal ? "G for the primal sides" : "H for the dual sides"));
  const Eigen::MatrixXd& u = op.left_singular();
  const Eigen::MatrixXd& v = op.right_singular();
  const Eigen::VectorXd& s = op.singular_values();
  const Eigen::Index m = s.size();

  const Eigen::VectorXd t = primal ? op.whiten_g(target.coefficients()) : op.whiten_h(target.coefficients());
  const Eigen::VectorXd proj = primal ? Eigen::VectorXd(u.leftCols(m).transpose() * t)
                                      : Eigen::VectorXd(v.leftCols(m).transpose() * t);
  std::vector<CoefVector> path;
  path.reserve(lambdas.size());
  for (double lambda : lambdas) {
    if (!(lambda > 0.0)) throw InvalidArgument("tikhonov_path: lambda must be positive");
    Eigen::VectorXd filt(m);
    for (Eigen::Index i = 0; i < m; ++i) filt[i] = s[i] / (s[i] * s[i] + lambda) * proj[i];
    if (primal) {
      path.emplace_back(op.hspace(), op.unwhiten_h(v.leftCols(m) * filt));
    } else {
      path.emplace_back(op.gspace(), op.unwhiten_g(u.leftCols(m) * filt));
    }
  }
  return path;
}

BiasReport bias_identity_check(const OperatorMatrix& op, const JointPMF& pmf, const FunctionalPair& fp,
                               const NuisanceTuple& eta, const OracleSolution& anchor) {
  eta.validate();
  if (!(eta.h.space() == op.hspace()) || !(eta.g.space() == op.gspace()))
    throw DimensionMismatch("bias_identity_check: nuisances are not over the operator's bases");

  const Eigen::MatrixXd& t = op.matrix();
  const Eigen::MatrixXd& ts = op.adjoint();
  const Eigen::MatrixXd& gg = op.gram_g().matrix;
  const Eigen::MatrixXd& gh = op.gram_h().matrix;
  auto ip_g = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y) { return x.dot(gg * y); };
  auto ip_h = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y) { return x.dot(gh * y); };

  const Eigen::VectorXd& h = eta.h.coefficients();
  const Eigen::VectorXd& g = eta.g.coefficients();
  const Eigen::VectorXd& ah = eta.alpha_h.coefficients();
  const Eigen::VectorXd& ag = eta.alpha_g.coefficients();
  const Eigen::VectorXd& xh = eta.xi_h.coefficients();
  const Eigen::VectorXd& xg = eta.xi_g.coefficients();
  const Eigen::VectorXd& xah = eta.xi_alpha_h.coefficients();
  const Eigen::VectorXd& xag = eta.xi_alpha_g.coefficients();

  const Eigen::VectorXd& hP = anchor.h_dag.coefficients();
  const Eigen::VectorXd& gP = anchor.g_dag.coefficients();
  const Eigen::VectorXd& ahP = anchor.alpha_h_dag.coefficients();
  const Eigen::VectorXd& agP = anchor.alpha_g_dag.coefficients();

  BiasReport rep;
  rep.lhs = score_mean(Observations::population(pmf), eta, fp) - anchor.psi;
  rep.termA = (g - gP).dot(op.cross_moments() * (h - hP));

  const Eigen::VectorXd t_ah_gap = t * ah - xah;
  rep.termB = ip_g(t * (h - hP), t * (ahP - ah)) + ip_g(t * h - xh, t_ah_gap) +
              ip_g(t_ah_gap, eta.r.coefficients() - anchor.r_P.coefficients());

  const Eigen::VectorXd ts_ag_gap = ts * ag - xag;
  rep.termC = ip_h(ts * (g - gP), ts * (agP - ag)) + ip_h(ts_ag_gap, ts * g - xg) +
              ip_h(ts_ag_gap, eta.a.coefficients() - anchor.a_P.coefficients());

  rep.residual = std::abs(rep.lhs - (rep.termA + rep.termB + rep.termC));
  return rep;
}

namespace {

void write_vector(std::ostream& os, const char* name, const CoefVector& c) {
  const auto* ind = std::get_if<IndicatorBasis>(&c.space().kind());
  for (int j = 0; j < c.size(); ++j) {
    os << name << ',' << j << ',';
    if (ind) os << ind->support[static_cast<std::size_t>(j)];
    os << ',' << c[j] << '\n';
  }
}

}  // namespace

void write_oracle_csv(std::ostream& os, const OracleSolution& sol) {
  const auto old_precision = os.precision();
  os << std::setprecision(17);
  os << "vector,index,point,value\n";
  os << "psi,0,," << sol.psi << '\n';
  write_vector(os, "h_dag", sol.h_dag);
  write_vector(os, "g_dag", sol.g_dag);
  write_vector(os, "alpha_h_dag", sol.alpha_h_dag);
  write_vector(os, "alpha_g_dag", sol.alpha_g_dag);
  write_vector(os, "r_P", sol.r_P);
  write_vector(os, "r_parallel", sol.r_parallel);
  write_vector(os, "r_perp", sol.r_perp);
  write_vector(os, "xi_h", sol.xi_h);
  write_vector(os, "xi_alpha_h", sol.xi_alpha_h);
  write_vector(os, "a_P", sol.a_P);
  write_vector(os, "a_parallel", sol.a_parallel);
  write_vector(os, "a_perp", sol.a_perp);
  write_vector(os, "xi_g", sol.xi_g);
  write_vector(os, "xi_alpha_g", sol.xi_alpha_g);
  os.precision(old_precision);
}

}  // namespace lsdml
