#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <vector>

namespace tailbound {

// One-dimensional log moment generating function of a centered random
// variable: lambda -> ln E exp(lambda * xi), finite for |lambda| < radius().
//
// Analytic kinds know their log-MGF in closed form. Empirical models are
// backed by an immutable sample array; their radius is a numerical validity
// cap, not a true divergence point, and everything derived from them is
// flagged as a lower estimate.
class MgfModel {
public:
    enum class Kind { gaussian, rademacher, custom, empirical };

    static MgfModel gaussian(double sigma);
    static MgfModel rademacher();

    // `variance` may be NaN, in which case it is estimated by central
    // differences of log_mgf at 0. `hard_radius` declares that the MGF
    // genuinely diverges at `radius` (as opposed to a validity cap).
    static MgfModel custom(std::function<double(double)> log_mgf,
                           double radius,
                           bool hard_radius = true,
                           double variance = std::numeric_limits<double>::quiet_NaN());

    // Centered samples; rejects |mean| > 3*stddev/sqrt(n). A zero
    // validity_radius selects the overflow-safe default 690 / max|s|.
    static MgfModel empirical(std::vector<double> samples, double validity_radius = 0.0);

    // xi -> c * xi.
    static MgfModel scaled(const MgfModel& model, double c);
    // Sum of independent variables: log-MGFs add, radii intersect.
    static MgfModel sum_of_independent(std::vector<MgfModel> parts);
    // Centered mixture: MGFs average with the mixture weights.
    static MgfModel mixture(std::vector<MgfModel> components, std::vector<double> weights);

    // +infinity outside the validity radius.
    double log_mgf(double lambda) const;
    // max(log_mgf(lambda), log_mgf(-lambda)); the Cramer-condition object.
    double symmetrized_log_mgf(double lambda) const;

    Kind kind() const { return kind_; }
    double radius() const { return radius_; }
    bool hard_radius() const { return hard_radius_; }
    double variance() const { return variance_; }
    bool lower_estimate_only() const { return lower_estimate_only_; }
    std::size_t sample_count() const { return samples_ ? samples_->size() : 0; }

private:
    MgfModel() = default;
    void validate() const;

    Kind kind_ = Kind::gaussian;
    double sigma_ = 1.0;                              // gaussian
    std::function<double(double)> fn_;                // custom
    std::shared_ptr<const std::vector<double>> samples_;  // empirical
    double max_abs_sample_ = 0.0;
    double radius_ = std::numeric_limits<double>::infinity();
    bool hard_radius_ = true;
    double variance_ = 1.0;
    bool lower_estimate_only_ = false;
};

}  // namespace tailbound
