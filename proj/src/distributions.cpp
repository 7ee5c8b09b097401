#include "sptest/distributions.hpp"

#include "sptest/error.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <string>

namespace sptest {

namespace {

void check_probability(double prob) {
    if (!(prob > 0.0 && prob < 1.0)) {
        throw Error(ErrorKind::DomainError,
                    "probability must lie in (0, 1), got " + std::to_string(prob));
    }
}

}  // namespace

double chi2_quantile(double df, double prob) {
    if (!(df >= 1.0) || !std::isfinite(df)) {
        throw Error(ErrorKind::DomainError, "chi-square df must be >= 1");
    }
    check_probability(prob);
    return boost::math::quantile(boost::math::chi_squared_distribution<double>(df), prob);
}

double chi2_upper_tail(double df, double x) {
    if (!(df >= 1.0)) throw Error(ErrorKind::DomainError, "chi-square df must be >= 1");
    if (std::isnan(x)) throw Error(ErrorKind::DomainError, "chi-square argument is NaN");
    if (x <= 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    return boost::math::cdf(
        boost::math::complement(boost::math::chi_squared_distribution<double>(df), x));
}

double normal_quantile(double prob) {
    check_probability(prob);
    return boost::math::quantile(boost::math::normal_distribution<double>(), prob);
}

double normal_upper_tail(double x) {
    if (std::isnan(x)) throw Error(ErrorKind::DomainError, "normal argument is NaN");
    if (std::isinf(x)) return x > 0 ? 0.0 : 1.0;
    return boost::math::cdf(boost::math::complement(boost::math::normal_distribution<double>(), x));
}

}  // namespace sptest
