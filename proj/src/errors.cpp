#include "kreinlab/errors.hpp"

#include <sstream>

namespace kreinlab {

namespace {

std::string describe_bracket(double lo, double hi, double f_lo, double f_hi) {
  std::ostringstream os;
  os.precision(6);
  os << "no sign change on [" << lo << ", " << hi << "]: f(lo) = " << f_lo << ", f(hi) = " << f_hi;
  return os.str();
}

std::string describe_tolerance(std::complex<double> best, double achieved, double requested) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << "quadrature tolerance not met: achieved error " << achieved << " > requested "
     << requested << " (best estimate " << best.real() << (best.imag() < 0 ? " - " : " + ")
     << std::abs(best.imag()) << "i)";
  return os.str();
}

}  // namespace

NoSignChange::NoSignChange(double lo_, double hi_, double f_lo_, double f_hi_)
    : Error(describe_bracket(lo_, hi_, f_lo_, f_hi_)), lo(lo_), hi(hi_), f_lo(f_lo_), f_hi(f_hi_) {}

ToleranceNotMet::ToleranceNotMet(std::complex<double> best_, double achieved_, double requested_)
    : Error(describe_tolerance(best_, achieved_, requested_)),
      best(best_),
      achieved(achieved_),
      requested(requested_) {}

NonHermitian::NonHermitian(double deviation_)
    : Error("Gram matrix is not Hermitian: max |M - M^H| = " + std::to_string(deviation_)),
      deviation(deviation_) {}

}  // namespace kreinlab
