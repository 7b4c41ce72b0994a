#include <iomanip>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "ccran/conic.hpp"

namespace ccran {

namespace {

void write_matrix(std::ostream& out, const Eigen::MatrixXcd& A) {
  for (Eigen::Index r = 0; r < A.rows(); ++r) {
    for (Eigen::Index c = 0; c < A.cols(); ++c) {
      if (c) out << "  ";
      out << A(r, c).real() << ' ' << A(r, c).imag();
    }
    out << '\n';
  }
}

void expect(std::istream& in, const std::string& word) {
  std::string got;
  if (!(in >> got) || got != word) {
    throw std::runtime_error("sdp dump: expected `" + word + "`, got `" + got + "`");
  }
}

Eigen::MatrixXcd read_matrix(std::istream& in, int n) {
  Eigen::MatrixXcd A(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      double re = 0.0;
      double im = 0.0;
      if (!(in >> re >> im)) throw std::runtime_error("sdp dump: truncated matrix");
      A(r, c) = {re, im};
    }
  }
  return A;
}

}  // namespace

void write_sdp(std::ostream& out, const LinearSdp& problem) {
  const auto old_precision = out.precision(17);
  out << "ccran-sdp 1\n";
  out << "blocks " << problem.num_blocks() << '\n';
  out << "dims";
  for (int d : problem.dims()) out << ' ' << d;
  out << '\n';
  out << "constant " << problem.objective_constant() << '\n';
  for (int m = 0; m < problem.num_blocks(); ++m) {
    out << "objective " << m << '\n';
    write_matrix(out, problem.objective(m));
  }
  out << "constraints " << problem.num_constraints() << '\n';
  for (int j = 0; j < problem.num_constraints(); ++j) {
    const auto& c = problem.constraints()[j];
    out << "constraint " << j << ' '
        << (c.sense == Sense::kGreaterEqual ? "ge" : "le") << ' ' << c.rhs << ' '
        << c.terms.size() << '\n';
    for (const auto& t : c.terms) {
      out << "term " << t.block << '\n';
      write_matrix(out, t.coeff);
    }
  }
  out.precision(old_precision);
}

LinearSdp read_sdp(std::istream& in) {
  expect(in, "ccran-sdp");
  int version = 0;
  if (!(in >> version) || version != 1) throw std::runtime_error("sdp dump: unsupported version");
  expect(in, "blocks");
  int nb = 0;
  if (!(in >> nb) || nb < 0) throw std::runtime_error("sdp dump: bad block count");
  expect(in, "dims");
  std::vector<int> dims(nb);
  for (int& d : dims) {
    if (!(in >> d)) throw std::runtime_error("sdp dump: bad dims line");
  }
  LinearSdp sdp(dims);
  expect(in, "constant");
  double constant = 0.0;
  in >> constant;
  sdp.set_objective_constant(constant);
  for (int m = 0; m < nb; ++m) {
    expect(in, "objective");
    int idx = -1;
    if (!(in >> idx) || idx != m) throw std::runtime_error("sdp dump: objective blocks out of order");
    sdp.set_objective(m, read_matrix(in, dims[m]));
  }
  expect(in, "constraints");
  int p = 0;
  if (!(in >> p) || p < 0) throw std::runtime_error("sdp dump: bad constraint count");
  for (int j = 0; j < p; ++j) {
    expect(in, "constraint");
    int idx = -1;
    std::string sense;
    LinearConstraint c;
    std::size_t nterms = 0;
    if (!(in >> idx >> sense >> c.rhs >> nterms) || idx != j ||
        (sense != "ge" && sense != "le")) {
      throw std::runtime_error("sdp dump: bad constraint header " + std::to_string(j));
    }
    c.sense = sense == "ge" ? Sense::kGreaterEqual : Sense::kLessEqual;
    for (std::size_t t = 0; t < nterms; ++t) {
      expect(in, "term");
      int block = -1;
      if (!(in >> block) || block < 0 || block >= nb) {
        throw std::runtime_error("sdp dump: bad term block");
      }
      c.terms.push_back(BlockTerm{block, read_matrix(in, dims[block])});
    }
    sdp.add_constraint(std::move(c));
  }
  return sdp;
}

}  // namespace ccran
