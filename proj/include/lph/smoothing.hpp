#ifndef LPH_SMOOTHING_HPP
#define LPH_SMOOTHING_HPP

#include "lph/types.hpp"

#include <cmath>
#include <vector>

namespace lph::smoothing {

// The smoothing family replaces |s|^p by the quadratic (p/2) t^{p-2} s^2 on
// [-t, t] and shifts the outer branch by (p/2 - 1) t^p so the two pieces
// meet in value and slope. The second derivative jumps by a factor p - 1 at
// |s| = t.

template <typename Scalar>
struct Derivatives {
  Scalar value;
  Scalar first;
  Scalar second;
  Scalar dt_of_first;  // d/dt of the first derivative
};

template <typename Scalar>
Derivatives<Scalar> eval(Scalar t, Scalar p, Scalar s) {
  using std::abs;
  using std::pow;
  const Scalar a = abs(s);
  if (a <= t) {
    const Scalar tp2 = pow(t, p - 2);
    return {p / 2 * tp2 * s * s, p * tp2 * s, p * tp2, p * (p - 2) * pow(t, p - 3) * s};
  }
  const Scalar ap2 = pow(a, p - 2);
  return {ap2 * a * a + (p / 2 - 1) * pow(t, p), p * ap2 * s, p * (p - 1) * ap2, Scalar(0)};
}

template <typename Scalar>
struct Extended {
  Scalar value;
  Scalar first;
  Scalar second;
};

namespace detail {

// Quadratic extension on an arbitrary (possibly negative) interval [lo, hi].
template <typename Scalar>
Extended<Scalar> eval_on_interval(Scalar t, Scalar p, Scalar lo, Scalar hi, Scalar s) {
  if (s >= lo && s <= hi) {
    const Derivatives<Scalar> f = eval(t, p, s);
    return {f.value, f.first, f.second};
  }
  const Scalar anchor = s > hi ? hi : lo;
  const Derivatives<Scalar> f = eval(t, p, anchor);
  const Scalar delta = s - anchor;
  return {f.value + f.first * delta + f.second / 2 * delta * delta, f.first + f.second * delta, f.second};
}

}  // namespace detail

/// The quadratic extension of f_t outside [lower, upper]: f_t itself inside,
/// its second-order Taylor polynomial at the nearer endpoint outside.
template <typename Scalar>
Extended<Scalar> eval_extended(Scalar t, Scalar p, Scalar lower, Scalar upper, Scalar s) {
  if (!(lower >= 0) || !(lower <= upper)) throw ParameterError("extension interval requires 0 <= lower <= upper");
  return detail::eval_on_interval(t, p, lower, upper, s);
}

template <typename Scalar>
struct Interval {
  Scalar lower;
  Scalar upper;
};

/// Band of magnitudes whose |.|^{p/2} lies within gamma of |s_ref_i|^{p/2};
/// the lower end clamps at 0.
template <typename Scalar>
std::vector<Interval<Scalar>> build_intervals(const Vector<Scalar>& s_ref, Scalar gamma, Scalar p) {
  using std::abs;
  using std::max;
  using std::pow;
  std::vector<Interval<Scalar>> out(static_cast<std::size_t>(s_ref.size()));
  for (Index i = 0; i < s_ref.size(); ++i) {
    const Scalar level = pow(abs(s_ref(i)), p / 2);
    out[std::size_t(i)] = {pow(max(Scalar(0), level - gamma), 2 / p), pow(level + gamma, 2 / p)};
  }
  return out;
}

/// f_t, optionally replaced coordinatewise by its quadratic extension.
///
/// With intervals present each coordinate carries a signed band: when the
/// magnitude band [l_i, u_i] has l_i = 0 the band is [-u_i, u_i], otherwise
/// it is [l_i, u_i] on the side of the reference residual's sign. The
/// extension is taken on that signed band so every coordinate stays convex
/// and C^1 on the whole line.
template <typename Scalar>
class SmoothedLoss {
 public:
  SmoothedLoss(Scalar t, Scalar p) : t_(t), p_(p) {
    if (!(t > 0)) throw ParameterError("smoothing radius t must be positive");
    if (!(p > 1)) throw ParameterError("exponent p must exceed 1");
  }

  SmoothedLoss(Scalar t, Scalar p, const Vector<Scalar>& s_ref, Scalar gamma) : SmoothedLoss(t, p) {
    if (!(gamma >= 0)) throw ParameterError("neighborhood width gamma must be nonnegative");
    intervals_ = build_intervals(s_ref, gamma, p);
    lo_.resize(s_ref.size());
    hi_.resize(s_ref.size());
    for (Index i = 0; i < s_ref.size(); ++i) {
      const Interval<Scalar>& iv = intervals_[std::size_t(i)];
      if (iv.lower == 0) {
        lo_(i) = -iv.upper;
        hi_(i) = iv.upper;
      } else if (s_ref(i) > 0) {
        lo_(i) = iv.lower;
        hi_(i) = iv.upper;
      } else {
        lo_(i) = -iv.upper;
        hi_(i) = -iv.lower;
      }
    }
  }

  Scalar t() const { return t_; }
  Scalar p() const { return p_; }
  bool extended() const { return lo_.size() > 0; }
  Index size() const { return lo_.size(); }
  const std::vector<Interval<Scalar>>& intervals() const { return intervals_; }
  const Vector<Scalar>& band_lower() const { return lo_; }
  const Vector<Scalar>& band_upper() const { return hi_; }

  /// Coordinate i at smoothing radius `radius`.
  Extended<Scalar> coordinate(Index i, Scalar radius, Scalar s) const {
    if (lo_.size() == 0) {
      const Derivatives<Scalar> f = eval(radius, p_, s);
      return {f.value, f.first, f.second};
    }
    return detail::eval_on_interval(radius, p_, lo_(i), hi_(i), s);
  }

 private:
  Scalar t_;
  Scalar p_;
  std::vector<Interval<Scalar>> intervals_;
  Vector<Scalar> lo_;
  Vector<Scalar> hi_;
};

/// A SmoothedLoss evaluated at one fixed radius, with the radius powers and
/// the endpoint Taylor data precomputed. Results are identical to
/// `SmoothedLoss::coordinate(i, radius, s)`.
template <typename Scalar>
class BoundLoss {
 public:
  BoundLoss(const SmoothedLoss<Scalar>& loss, Scalar radius)
      : r_(radius), p_(loss.p()), tp2_(std::pow(radius, loss.p() - 2)),
        shift_((loss.p() / 2 - 1) * std::pow(radius, loss.p())), lo_(loss.band_lower()), hi_(loss.band_upper()) {
    lo_f_.resize(lo_.size());
    hi_f_.resize(hi_.size());
    for (Index i = 0; i < lo_.size(); ++i) {
      lo_f_[std::size_t(i)] = base(lo_(i));
      hi_f_[std::size_t(i)] = base(hi_(i));
    }
  }

  Scalar radius() const { return r_; }

  Extended<Scalar> operator()(Index i, Scalar s) const {
    if (lo_.size() == 0) return base(s);
    if (s >= lo_(i) && s <= hi_(i)) return base(s);
    const bool above = s > hi_(i);
    const Scalar delta = s - (above ? hi_(i) : lo_(i));
    const Extended<Scalar>& f = above ? hi_f_[std::size_t(i)] : lo_f_[std::size_t(i)];
    return {f.value + f.first * delta + f.second / 2 * delta * delta, f.first + f.second * delta, f.second};
  }

 private:
  Extended<Scalar> base(Scalar s) const {
    const Scalar a = std::abs(s);
    if (a <= r_) return {p_ / 2 * tp2_ * s * s, p_ * tp2_ * s, p_ * tp2_};
    const Scalar ap2 = std::pow(a, p_ - 2);
    return {ap2 * a * a + shift_, p_ * ap2 * s, p_ * (p_ - 1) * ap2};
  }

  Scalar r_, p_, tp2_, shift_;
  Vector<Scalar> lo_, hi_;
  std::vector<Extended<Scalar>> lo_f_, hi_f_;
};

template <typename Scalar>
struct TildeValue {
  Scalar value;
  Vector<Scalar> gradient;
  Vector<Scalar> diag_hessian;
};

/// Sum over coordinates of the extended loss at radius (1 - h) t.
template <typename Scalar>
TildeValue<Scalar> tilde_eval(const SmoothedLoss<Scalar>& loss, Scalar h, const Vector<Scalar>& s) {
  if (!loss.extended()) throw ParameterError("tilde_eval requires extension intervals");
  if (loss.size() != s.size()) throw DimensionError("s", "interval count does not match the residual length");
  const Scalar radius = (1 - h) * loss.t();
  TildeValue<Scalar> out{Scalar(0), Vector<Scalar>(s.size()), Vector<Scalar>(s.size())};
  for (Index i = 0; i < s.size(); ++i) {
    const Extended<Scalar> e = loss.coordinate(i, radius, s(i));
    out.value += e.value;
    out.gradient(i) = e.first;
    out.diag_hessian(i) = e.second;
  }
  return out;
}

/// sup_s |f_t(s) - |s|^p| = |p/2 - 1| t^p.
template <typename Scalar>
Scalar uniform_gap(Scalar t, Scalar p) {
  using std::abs;
  using std::pow;
  return abs(p / 2 - 1) * pow(t, p);
}

}  // namespace lph::smoothing

#endif  // LPH_SMOOTHING_HPP
