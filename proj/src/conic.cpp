#include "ccran/conic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ccran {

using Mat = Eigen::MatrixXcd;

namespace {

// Re Tr(A^H B)
double inner(const Mat& a, const Mat& b) {
  return (a.array().conjugate() * b.array()).real().sum();
}

Mat herm(const Mat& a) { return 0.5 * (a + a.adjoint()); }

bool is_hermitian(const Mat& a) {
  const double scale = std::max(1.0, a.norm());
  return (a - a.adjoint()).norm() <= 1e-12 * scale;
}

}  // namespace

const char* to_string(SdpStatus status) {
  switch (status) {
    case SdpStatus::kOptimal: return "optimal";
    case SdpStatus::kInfeasible: return "infeasible";
    case SdpStatus::kNumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

LinearSdp::LinearSdp(std::vector<int> block_dims) : dims_(std::move(block_dims)) {
  for (int d : dims_) {
    if (d < 1) throw std::invalid_argument("SDP block dimension must be >= 1");
    objective_.push_back(Mat::Zero(d, d));
  }
}

void LinearSdp::set_objective(int block, Mat coeff) {
  if (block < 0 || block >= num_blocks()) {
    throw std::invalid_argument("objective block index out of range");
  }
  if (coeff.rows() != dims_[block] || coeff.cols() != dims_[block]) {
    throw std::invalid_argument("objective block has the wrong dimension");
  }
  objective_[block] = std::move(coeff);
}

void LinearSdp::add_constraint(LinearConstraint c) {
  for (const auto& t : c.terms) {
    if (t.block < 0 || t.block >= num_blocks()) {
      throw std::invalid_argument("constraint block index out of range");
    }
    if (t.coeff.rows() != dims_[t.block] || t.coeff.cols() != dims_[t.block]) {
      throw std::invalid_argument("constraint coefficient has the wrong dimension");
    }
  }
  constraints_.push_back(std::move(c));
}

void LinearSdp::validate() const {
  for (int m = 0; m < num_blocks(); ++m) {
    if (!is_hermitian(objective_[m])) {
      throw std::invalid_argument("objective block " + std::to_string(m) +
                                  " is not Hermitian");
    }
  }
  for (int j = 0; j < num_constraints(); ++j) {
    for (const auto& t : constraints_[j].terms) {
      if (!is_hermitian(t.coeff)) {
        throw std::invalid_argument("constraint " + std::to_string(j) +
                                    " has a non-Hermitian coefficient");
      }
    }
    if (!std::isfinite(constraints_[j].rhs)) {
      throw std::invalid_argument("constraint right-hand side is not finite");
    }
  }
}

double LinearSdp::evaluate_objective(std::span<const Mat> blocks) const {
  double v = constant_;
  for (int m = 0; m < num_blocks(); ++m) v += inner(objective_[m], blocks[m]);
  return v;
}

double LinearSdp::evaluate_constraint(int j, std::span<const Mat> blocks) const {
  double v = 0.0;
  for (const auto& t : constraints_.at(j).terms) v += inner(t.coeff, blocks[t.block]);
  return v;
}

// ---------------------------------------------------------------------------
// Interior-point engine
// ---------------------------------------------------------------------------

namespace {

// All rows in >= form, scaled to unit Frobenius norm.
struct Normalized {
  std::vector<int> dims;
  std::vector<Mat> C;
  std::vector<std::vector<BlockTerm>> rows;
  Eigen::VectorXd b;
  Eigen::VectorXd row_factor;  // original row = normalized row / factor (sign included)
  // (row, term) pairs touching each block
  std::vector<std::vector<std::pair<int, int>>> by_block;

  int p() const { return static_cast<int>(rows.size()); }
  int nblocks() const { return static_cast<int>(dims.size()); }
};

Normalized normalize(const LinearSdp& problem) {
  Normalized out;
  out.dims = problem.dims();
  for (int m = 0; m < problem.num_blocks(); ++m) out.C.push_back(problem.objective(m));
  const int p = problem.num_constraints();
  out.b.resize(p);
  out.row_factor.resize(p);
  out.by_block.resize(out.dims.size());
  for (int j = 0; j < p; ++j) {
    const auto& c = problem.constraints()[j];
    double norm2 = 0.0;
    for (const auto& t : c.terms) norm2 += t.coeff.squaredNorm();
    const double norm = std::sqrt(norm2);
    const double sign = c.sense == Sense::kGreaterEqual ? 1.0 : -1.0;
    const double factor = sign / (norm > 0.0 ? norm : 1.0);
    std::vector<BlockTerm> terms;
    for (const auto& t : c.terms) {
      if (t.coeff.squaredNorm() == 0.0) continue;
      terms.push_back(BlockTerm{t.block, factor * t.coeff});
    }
    out.b(j) = factor * c.rhs;
    out.row_factor(j) = factor;
    for (int i = 0; i < static_cast<int>(terms.size()); ++i) {
      out.by_block[terms[i].block].emplace_back(j, i);
    }
    out.rows.push_back(std::move(terms));
  }
  return out;
}

struct State {
  std::vector<Mat> X, Z;
  Eigen::VectorXd s, y;
};

Eigen::VectorXd apply_A(const Normalized& P, const std::vector<Mat>& X) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(P.p());
  for (int j = 0; j < P.p(); ++j) {
    for (const auto& t : P.rows[j]) v(j) += inner(t.coeff, X[t.block]);
  }
  return v;
}

std::vector<Mat> apply_At(const Normalized& P, const Eigen::VectorXd& y) {
  std::vector<Mat> out;
  for (int d : P.dims) out.push_back(Mat::Zero(d, d));
  for (int j = 0; j < P.p(); ++j) {
    for (const auto& t : P.rows[j]) out[t.block] += y(j) * t.coeff;
  }
  return out;
}

double frob_norm(const std::vector<Mat>& blocks) {
  double s = 0.0;
  for (const auto& b : blocks) s += b.squaredNorm();
  return std::sqrt(s);
}

// Largest alpha <= cap keeping X + alpha dX PSD.
double max_step_psd(const Mat& X, const Mat& dX, double cap) {
  if (X.rows() == 1) {
    const double d = dX(0, 0).real();
    return d < 0.0 ? std::min(cap, -X(0, 0).real() / d) : cap;
  }
  Eigen::LLT<Mat> llt(X);
  if (llt.info() != Eigen::Success) return 0.0;
  const Mat T = llt.matrixL().solve(dX);
  const Mat S = llt.matrixL().solve(T.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> eig(herm(S), Eigen::EigenvaluesOnly);
  const double lmin = eig.eigenvalues().minCoeff();
  return lmin < 0.0 ? std::min(cap, -1.0 / lmin) : cap;
}

double max_step_orthant(const Eigen::VectorXd& s, const Eigen::VectorXd& ds, double cap) {
  double a = cap;
  for (int i = 0; i < s.size(); ++i) {
    if (ds(i) < 0.0) a = std::min(a, -s(i) / ds(i));
  }
  return a;
}

struct Direction {
  std::vector<Mat> dX, dZ;
  Eigen::VectorXd ds, dy;
};

class NewtonSystem {
 public:
  NewtonSystem(const Normalized& P, const State& st) : P_(P), st_(st) {
    const int p = P.p();
    for (int m = 0; m < P.nblocks(); ++m) {
      Eigen::LLT<Mat> llt(st.Z[m]);
      if (llt.info() != Eigen::Success) {
        ok_ = false;
        return;
      }
      Zinv_.push_back(llt.solve(Mat::Identity(P.dims[m], P.dims[m])));
    }
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(p, p);
    for (int j = 0; j < p; ++j) M(j, j) = st.s(j) / st.y(j);
    for (int m = 0; m < P.nblocks(); ++m) {
      const auto& touching = P.by_block[m];
      std::vector<Mat> prod;
      prod.reserve(touching.size());
      for (const auto& [j, ti] : touching) {
        prod.push_back(st.X[m] * P.rows[j][ti].coeff * Zinv_[m]);
      }
      for (std::size_t a = 0; a < touching.size(); ++a) {
        const auto& [i, ti] = touching[a];
        const Mat& Ai = P.rows[i][ti].coeff;
        for (std::size_t c = 0; c < touching.size(); ++c) {
          M(i, touching[c].first) += inner(Ai, prod[c]);
        }
      }
    }
    M = 0.5 * (M + M.transpose());
    llt_.compute(M);
    if (llt_.info() != Eigen::Success) {
      const double reg = 1e-14 * std::max(1.0, M.diagonal().maxCoeff());
      M.diagonal().array() += reg;
      llt_.compute(M);
      ok_ = llt_.info() == Eigen::Success;
    }
  }

  bool ok() const { return ok_; }

  // Newton direction towards X Z = target I, s y = target, with optional
  // second-order corrector terms from a predictor step.
  Direction solve(const Eigen::VectorXd& rp, const std::vector<Mat>& Rd,
                  double target, const Direction* pred) const {
    const int nb = P_.nblocks();
    std::vector<Mat> G(nb), T(nb);
    for (int m = 0; m < nb; ++m) {
      const int n = P_.dims[m];
      Mat R = target * Mat::Identity(n, n);
      if (pred) R -= pred->dX[m] * pred->dZ[m];
      G[m] = herm(R * Zinv_[m]);
      T[m] = G[m] - st_.X[m] - herm(st_.X[m] * Rd[m] * Zinv_[m]);
    }
    Eigen::VectorXd g = Eigen::VectorXd::Constant(P_.p(), target);
    if (pred) g -= pred->ds.cwiseProduct(pred->dy);
    g = g.cwiseQuotient(st_.y);

    const Eigen::VectorXd rhs = rp - apply_A(P_, T) + g - st_.s;
    Direction d;
    d.dy = llt_.solve(rhs);
    const auto Aty = apply_At(P_, d.dy);
    d.dZ.resize(nb);
    d.dX.resize(nb);
    for (int m = 0; m < nb; ++m) {
      d.dZ[m] = Rd[m] - Aty[m];
      d.dX[m] = G[m] - st_.X[m] - herm(st_.X[m] * d.dZ[m] * Zinv_[m]);
    }
    d.ds = g - st_.s - st_.s.cwiseQuotient(st_.y).cwiseProduct(d.dy);
    return d;
  }

 private:
  const Normalized& P_;
  const State& st_;
  std::vector<Mat> Zinv_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  bool ok_ = true;
};

struct StepSizes {
  double primal;
  double dual;
};

StepSizes step_sizes(const State& st, const Direction& d, double cap) {
  StepSizes a{cap, cap};
  for (std::size_t m = 0; m < st.X.size(); ++m) {
    a.primal = std::min(a.primal, max_step_psd(st.X[m], d.dX[m], cap));
    a.dual = std::min(a.dual, max_step_psd(st.Z[m], d.dZ[m], cap));
  }
  a.primal = std::min(a.primal, max_step_orthant(st.s, d.ds, cap));
  a.dual = std::min(a.dual, max_step_orthant(st.y, d.dy, cap));
  return a;
}

double complementarity(const State& st) {
  double c = st.s.dot(st.y);
  for (std::size_t m = 0; m < st.X.size(); ++m) c += inner(st.X[m], st.Z[m]);
  return c;
}

SdpSolution solve_core(const LinearSdp& problem, const Normalized& P,
                       const SolverOptions& opt) {
  const int nb = P.nblocks();
  const int p = P.p();
  int total_dim = p;
  for (int d : P.dims) total_dim += d;

  double max_row_ratio = 0.0;
  for (int j = 0; j < p; ++j) max_row_ratio = std::max(max_row_ratio, 1.0 + std::abs(P.b(j)));
  const double normC = std::sqrt([&] {
    double s = 0.0;
    for (const auto& c : P.C) s += c.squaredNorm();
    return s;
  }());

  State st;
  for (int m = 0; m < nb; ++m) {
    const int n = P.dims[m];
    const double xi = std::max({10.0, std::sqrt(double(n)), n * max_row_ratio});
    const double zeta = std::max({10.0, std::sqrt(double(n)), 1.0, P.C[m].norm()});
    st.X.push_back(xi * Mat::Identity(n, n));
    st.Z.push_back(zeta * Mat::Identity(n, n));
  }
  const double zeta_s = std::max({10.0, normC / std::max(1, nb)});
  st.s = Eigen::VectorXd::Constant(p, std::max(10.0, max_row_ratio));
  st.y = Eigen::VectorXd::Constant(p, zeta_s);

  const double norm_b = 1.0 + P.b.norm();
  const double norm_c = 1.0 + normC;

  SdpSolution sol;
  int stalls = 0;
  for (int iter = 0; iter <= opt.max_iters; ++iter) {
    sol.iterations = iter;
    const Eigen::VectorXd AX = apply_A(P, st.X);
    const Eigen::VectorXd rp = P.b - AX + st.s;
    const auto Aty = apply_At(P, st.y);
    std::vector<Mat> Rd(nb);
    double pobj = 0.0;
    for (int m = 0; m < nb; ++m) {
      Rd[m] = P.C[m] - Aty[m] - st.Z[m];
      pobj += inner(P.C[m], st.X[m]);
    }
    const double dobj = P.b.dot(st.y);
    const double comp = complementarity(st);
    const double mu = comp / total_dim;

    const double relp = rp.norm() / norm_b;
    const double reld = frob_norm(Rd) / norm_c;
    const double gap = std::max(std::abs(pobj - dobj), comp) / (1.0 + std::abs(pobj));
    sol.kkt_residual = std::max({relp, reld, gap});
    sol.objective_value = pobj + problem.objective_constant();
    sol.dual_value = dobj + problem.objective_constant();

    if (!std::isfinite(sol.kkt_residual)) {
      sol.status = SdpStatus::kNumericalFailure;
      sol.message = "non-finite iterate";
      break;
    }
    if (relp <= opt.tol && reld <= opt.tol && gap <= opt.tol) {
      sol.status = SdpStatus::kOptimal;
      sol.blocks = st.X;
      sol.multipliers.resize(p);
      for (int j = 0; j < p; ++j) sol.multipliers[j] = st.y(j) * std::abs(P.row_factor(j));
      return sol;
    }

    // Farkas ray for the primal: y >= 0, b'y > 0, -A*(y) PSD.
    if (dobj > 0.0) {
      std::vector<Mat> ray(nb);
      for (int m = 0; m < nb; ++m) ray[m] = (Aty[m] + st.Z[m]) / dobj;
      if (frob_norm(ray) <= 1e-8 * (1.0 + frob_norm(st.Z) / dobj) && dobj > 1e8 * norm_c) {
        sol.status = SdpStatus::kInfeasible;
        sol.message = "primal infeasibility certificate (dual ray)";
        return sol;
      }
    }
    if (iter == opt.max_iters) {
      sol.status = SdpStatus::kNumericalFailure;
      sol.message = "iteration limit reached";
      break;
    }

    NewtonSystem newton(P, st);
    if (!newton.ok()) {
      sol.status = SdpStatus::kNumericalFailure;
      sol.message = "Schur complement factorization failed";
      break;
    }
    const Direction pred = newton.solve(rp, Rd, 0.0, nullptr);
    const StepSizes ap = step_sizes(st, pred, 1.0);
    double comp_aff = 0.0;
    for (int m = 0; m < nb; ++m) {
      comp_aff += inner(st.X[m] + ap.primal * pred.dX[m], st.Z[m] + ap.dual * pred.dZ[m]);
    }
    comp_aff += (st.s + ap.primal * pred.ds).dot(st.y + ap.dual * pred.dy);
    const double ratio = std::clamp(comp_aff / comp, 0.0, 1.0);
    const double sigma = std::min(1.0, ratio * ratio * ratio);

    const Direction corr = newton.solve(rp, Rd, sigma * mu, &pred);
    const double cap = 1.0;
    StepSizes a = step_sizes(st, corr, 1e30);
    const double damp = 0.98;
    a.primal = std::min(cap, damp * a.primal);
    a.dual = std::min(cap, damp * a.dual);

    for (int m = 0; m < nb; ++m) {
      st.X[m] = herm(st.X[m] + a.primal * corr.dX[m]);
      st.Z[m] = herm(st.Z[m] + a.dual * corr.dZ[m]);
    }
    st.s += a.primal * corr.ds;
    st.y += a.dual * corr.dy;

    stalls = (a.primal < 1e-9 && a.dual < 1e-9) ? stalls + 1 : 0;
    if (stalls >= 3) {
      sol.status = SdpStatus::kNumericalFailure;
      sol.message = "step length stalled";
      break;
    }
  }
  sol.blocks = st.X;
  return sol;
}

// min t  s.t.  A_j(X) + t >= b_j,  t >= 0. Strictly feasible by construction.
LinearSdp phase_one_problem(const Normalized& P) {
  std::vector<int> dims = P.dims;
  dims.push_back(1);
  LinearSdp ph(dims);
  const int t_block = static_cast<int>(dims.size()) - 1;
  ph.set_objective(t_block, Mat::Ones(1, 1));
  for (int j = 0; j < P.p(); ++j) {
    LinearConstraint c;
    c.terms = P.rows[j];
    c.terms.push_back(BlockTerm{t_block, Mat::Ones(1, 1)});
    c.sense = Sense::kGreaterEqual;
    c.rhs = P.b(j);
    ph.add_constraint(std::move(c));
  }
  return ph;
}

}  // namespace

SdpSolution solve(const LinearSdp& problem, const SolverOptions& options) {
  if (!(options.tol > 0.0)) throw std::invalid_argument("solver tolerance must be > 0");
  problem.validate();
  const Normalized P = normalize(problem);
  SdpSolution sol = solve_core(problem, P, options);
  if (sol.status != SdpStatus::kNumericalFailure || !options.phase_one ||
      P.p() == 0) {
    return sol;
  }

  const LinearSdp ph = phase_one_problem(P);
  SolverOptions ph_opt = options;
  ph_opt.phase_one = false;
  const SdpSolution ph_sol = solve_core(ph, normalize(ph), ph_opt);
  if (ph_sol.status == SdpStatus::kOptimal) {
    const double violation = ph_sol.blocks.back()(0, 0).real();
    if (violation > std::max(1e-6, 100.0 * options.tol)) {
      sol.status = SdpStatus::kInfeasible;
      sol.message = "phase-I minimum violation " + std::to_string(violation);
      return sol;
    }
    sol.message += "; phase-I finds the problem feasible";
  } else {
    sol.message += "; phase-I " + std::string(to_string(ph_sol.status));
  }
  return sol;
}

// ---------------------------------------------------------------------------

SelectorMatrices::SelectorMatrices(int num_bs, int antennas_per_bs)
    : num_bs_(num_bs), antennas_(antennas_per_bs) {
  if (num_bs < 1 || antennas_per_bs < 1) {
    throw std::invalid_argument("selector matrices need L >= 1 and N_t >= 1");
  }
}

Mat SelectorMatrices::matrix(int bs) const {
  Mat J = Mat::Zero(dim(), dim());
  J.diagonal().segment(bs * antennas_, antennas_).setOnes();
  return J;
}

LinearSdp assemble_qos_sdp(std::span<const Mat> H, const GroupSet& groups,
                           const SelectorMatrices& selectors,
                           std::span<const double> power_budget,
                           double noise_power, std::vector<Mat> objective_blocks,
                           double objective_constant) {
  const int M = groups.size();
  const int n = selectors.dim();
  if (static_cast<int>(objective_blocks.size()) != M) {
    throw std::invalid_argument("need one objective block per group");
  }
  if (static_cast<int>(power_budget.size()) != selectors.num_bs()) {
    throw std::invalid_argument("need one power budget per BS");
  }
  if (groups.num_users() != static_cast<int>(H.size())) {
    throw std::invalid_argument("group membership does not match the channel count");
  }
  for (const auto& Hk : H) {
    if (Hk.rows() != n || Hk.cols() != n) {
      throw std::invalid_argument("channel matrix dimension differs from L*N_t");
    }
  }

  LinearSdp sdp(std::vector<int>(M, n));
  for (int m = 0; m < M; ++m) sdp.set_objective(m, std::move(objective_blocks[m]));
  sdp.set_objective_constant(objective_constant);

  for (int m = 0; m < M; ++m) {
    const double gamma = groups.groups[m].target_sinr;
    for (int k : groups.groups[m].users) {
      LinearConstraint c;
      c.sense = Sense::kGreaterEqual;
      c.rhs = gamma * noise_power;
      for (int q = 0; q < M; ++q) {
        c.terms.push_back(BlockTerm{q, q == m ? Mat(H[k]) : Mat(-gamma * H[k])});
      }
      sdp.add_constraint(std::move(c));
    }
  }
  for (int l = 0; l < selectors.num_bs(); ++l) {
    LinearConstraint c;
    c.sense = Sense::kLessEqual;
    c.rhs = power_budget[l];
    const Mat J = selectors.matrix(l);
    for (int m = 0; m < M; ++m) c.terms.push_back(BlockTerm{m, J});
    sdp.add_constraint(std::move(c));
  }
  return sdp;
}

Eigen::MatrixXd real_embedding(const Mat& X) {
  const auto n = X.rows();
  Eigen::MatrixXd out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = X.real();
  out.topRightCorner(n, n) = -X.imag();
  out.bottomLeftCorner(n, n) = X.imag();
  out.bottomRightCorner(n, n) = X.real();
  return out;
}

LinearSdp embed_real(const LinearSdp& problem) {
  std::vector<int> dims;
  for (int d : problem.dims()) dims.push_back(2 * d);
  LinearSdp out(dims);
  for (int m = 0; m < problem.num_blocks(); ++m) {
    out.set_objective(m, 0.5 * real_embedding(problem.objective(m)).cast<std::complex<double>>());
  }
  out.set_objective_constant(problem.objective_constant());
  for (const auto& c : problem.constraints()) {
    LinearConstraint e;
    e.sense = c.sense;
    e.rhs = c.rhs;
    for (const auto& t : c.terms) {
      e.terms.push_back(
          BlockTerm{t.block, 0.5 * real_embedding(t.coeff).cast<std::complex<double>>()});
    }
    out.add_constraint(std::move(e));
  }
  return out;
}

}  // namespace ccran

namespace ccran {

namespace {

Mat submatrix(const Mat& A, const std::vector<int>& idx) {
  const int k = static_cast<int>(idx.size());
  Mat out(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) out(i, j) = A(idx[i], idx[j]);
  }
  return out;
}

}  // namespace

bool restrict_blocks(const LinearSdp& problem, const std::vector<std::vector<int>>& keep,
                     LinearSdp& out) {
  const int B = problem.num_blocks();
  if (static_cast<int>(keep.size()) != B) {
    throw std::invalid_argument("restrict_blocks: one index list per block required");
  }
  // Emptied blocks are dropped and the rest renumbered.
  std::vector<int> remap(B, -1);
  std::vector<int> dims;
  for (int b = 0; b < B; ++b) {
    for (int i : keep[b]) {
      if (i < 0 || i >= problem.dims()[b]) {
        throw std::invalid_argument("restrict_blocks: index out of range");
      }
    }
    if (!keep[b].empty()) {
      remap[b] = static_cast<int>(dims.size());
      dims.push_back(static_cast<int>(keep[b].size()));
    }
  }
  LinearSdp sub(dims);
  for (int b = 0; b < B; ++b) {
    if (remap[b] >= 0) sub.set_objective(remap[b], submatrix(problem.objective(b), keep[b]));
  }
  sub.set_objective_constant(problem.objective_constant());
  for (const auto& c : problem.constraints()) {
    LinearConstraint r;
    r.sense = c.sense;
    r.rhs = c.rhs;
    for (const auto& t : c.terms) {
      if (remap[t.block] >= 0) {
        r.terms.push_back(BlockTerm{remap[t.block], submatrix(t.coeff, keep[t.block])});
      }
    }
    if (r.terms.empty()) {
      const bool ok = c.sense == Sense::kGreaterEqual ? 0.0 >= c.rhs : 0.0 <= c.rhs;
      if (!ok) return false;
      continue;
    }
    sub.add_constraint(std::move(r));
  }
  out = std::move(sub);
  return true;
}

std::vector<Mat> lift_blocks(std::span<const Mat> blocks,
                             const std::vector<std::vector<int>>& keep,
                             const std::vector<int>& dims) {
  std::vector<Mat> out;
  std::size_t next = 0;
  for (std::size_t b = 0; b < keep.size(); ++b) {
    Mat full = Mat::Zero(dims[b], dims[b]);
    if (!keep[b].empty()) {
      const Mat& sub = blocks[next++];
      for (std::size_t i = 0; i < keep[b].size(); ++i) {
        for (std::size_t j = 0; j < keep[b].size(); ++j) {
          full(keep[b][i], keep[b][j]) = sub(i, j);
        }
      }
    }
    out.push_back(std::move(full));
  }
  return out;
}

}  // namespace ccran
