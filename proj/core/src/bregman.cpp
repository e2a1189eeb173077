#include "rbgd/bregman.hpp"

#include <cmath>
#include <sstream>

#include "rbgd/errors.hpp"

namespace rbgd {

const char* to_string(ReferenceKind kind) {
  switch (kind) {
    case ReferenceKind::Quadratic: return "quadratic";
    case ReferenceKind::Quartic: return "quartic";
    case ReferenceKind::LogBarrier: return "log_barrier";
    case ReferenceKind::Entropy: return "entropy";
  }
  return "unknown";
}

namespace {

void check_box(const DomainBox& box) {
  if (!(box.lower >= 0.0) || !(box.upper > box.lower) || !std::isfinite(box.upper)) {
    throw Error(ErrorKind::InvalidArgument, "domain box must satisfy 0 <= lower < upper < inf");
  }
}

}  // namespace

ReferenceFunction ReferenceFunction::quadratic() {
  return ReferenceFunction(ReferenceKind::Quadratic, 1.0);
}

ReferenceFunction ReferenceFunction::quartic() {
  return ReferenceFunction(ReferenceKind::Quartic, 1.0);
}

ReferenceFunction ReferenceFunction::log_barrier(DomainBox box) {
  check_box(box);
  return ReferenceFunction(ReferenceKind::LogBarrier, 1.0 / (box.upper * box.upper));
}

ReferenceFunction ReferenceFunction::entropy(DomainBox box) {
  check_box(box);
  return ReferenceFunction(ReferenceKind::Entropy, 1.0 / box.upper);
}

bool ReferenceFunction::in_domain(const Matrix& x) const {
  if (!x.allFinite()) return false;
  if (kind_ == ReferenceKind::LogBarrier || kind_ == ReferenceKind::Entropy) {
    return (x.array() > 0.0).all();
  }
  return true;
}

void ReferenceFunction::check_domain(const Matrix& x) const {
  const bool positive =
      kind_ == ReferenceKind::LogBarrier || kind_ == ReferenceKind::Entropy;
  const double* data = x.data();
  for (Index i = 0; i < x.size(); ++i) {
    if (!std::isfinite(data[i]) || (positive && !(data[i] > 0.0))) {
      std::ostringstream msg;
      msg << to_string(kind_) << ": entry " << i << " = " << data[i] << " is out of domain";
      throw DomainError(static_cast<std::size_t>(i), msg.str());
    }
  }
}

double ReferenceFunction::value(const Matrix& x) const {
  check_domain(x);
  switch (kind_) {
    case ReferenceKind::Quadratic: return 0.5 * x.squaredNorm();
    case ReferenceKind::Quartic: {
      const double n2 = x.squaredNorm();
      return 0.25 * n2 * n2 + 0.5 * n2;
    }
    case ReferenceKind::LogBarrier: return -x.array().log().sum();
    case ReferenceKind::Entropy: return (x.array() * x.array().log()).sum();
  }
  return 0.0;
}

Matrix ReferenceFunction::gradient(const Matrix& x) const {
  check_domain(x);
  switch (kind_) {
    case ReferenceKind::Quadratic: return x;
    case ReferenceKind::Quartic: return (x.squaredNorm() + 1.0) * x;
    case ReferenceKind::LogBarrier: return -x.array().inverse().matrix();
    case ReferenceKind::Entropy: return (x.array().log() + 1.0).matrix();
  }
  return x;
}

Matrix ReferenceFunction::hessian_apply(const Matrix& x, const Matrix& d) const {
  check_domain(x);
  switch (kind_) {
    case ReferenceKind::Quadratic: return d;
    case ReferenceKind::Quartic:
      return (x.squaredNorm() + 1.0) * d + (2.0 * x.cwiseProduct(d).sum()) * x;
    case ReferenceKind::LogBarrier: return (d.array() / x.array().square()).matrix();
    case ReferenceKind::Entropy: return (d.array() / x.array()).matrix();
  }
  return d;
}

double h_value(const ReferenceFunction& h, const Matrix& x) { return h.value(x); }

Matrix h_grad(const ReferenceFunction& h, const Matrix& x) { return h.gradient(x); }

BregmanEval bregman(const ReferenceFunction& h, const Matrix& y, const Matrix& x) {
  if (y.rows() != x.rows() || y.cols() != x.cols()) {
    throw Error(ErrorKind::InvalidArgument, "bregman: shape mismatch");
  }
  const Matrix gx = h.gradient(x);
  const Matrix gy = h.gradient(y);
  const double value = (h.value(y) - h.value(x)) - gx.cwiseProduct(y - x).sum();
  return BregmanEval{value, gy - gx};
}

}  // namespace rbgd
