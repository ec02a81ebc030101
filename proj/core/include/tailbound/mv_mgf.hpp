#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <vector>

#include "tailbound/mgf.hpp"

namespace tailbound {

// Holder exponents: q_i >= 1 with sum 1/q_i = 1.
struct HolderWeights {
    std::vector<double> q;

    explicit HolderWeights(std::vector<double> q_in);
    static HolderWeights uniform(std::size_t d);  // q_i = d
};

// d-dimensional log-MGF source: lambda -> ln E exp((lambda, xi)), finite for
// |lambda| < epsilon. Gaussian kinds accept any symmetric PSD covariance;
// holder-product kinds hold the Holder upper envelope of independent-style
// marginals; empirical kinds average exp(lambda . row) over a sample matrix.
class MultivariateMgf {
public:
    enum class Kind { gaussian, custom, holder_product, empirical };

    static MultivariateMgf gaussian(Eigen::MatrixXd cov);
    static MultivariateMgf custom(int d, std::function<double(const Eigen::VectorXd&)> log_mgf,
                                  double epsilon);
    static MultivariateMgf holder_product(std::vector<MgfModel> marginals, HolderWeights q);
    // Exact joint log-MGF of independent coordinates (sum of marginals).
    static MultivariateMgf product_of_independent(std::vector<MgfModel> marginals);
    static MultivariateMgf empirical(Eigen::MatrixXd samples);
    // ln sum_c w_c exp(log_mgf_c(lambda)) over component joints.
    static MultivariateMgf mixture(std::vector<MultivariateMgf> components,
                                   std::vector<double> weights);

    double log_mgf(const Eigen::VectorXd& lambda) const;  // +infinity outside radius

    int dim() const { return d_; }
    double epsilon() const { return epsilon_; }
    Kind kind() const { return kind_; }
    bool lower_estimate_only() const { return lower_estimate_only_; }
    // Covariance when the model is analytic Gaussian, else nullptr.
    const Eigen::MatrixXd* covariance() const;

private:
    MultivariateMgf() = default;
    void check_convexity() const;

    Kind kind_ = Kind::custom;
    int d_ = 0;
    double epsilon_ = std::numeric_limits<double>::infinity();
    bool lower_estimate_only_ = false;
    std::shared_ptr<const Eigen::MatrixXd> cov_;
    std::function<double(const Eigen::VectorXd&)> fn_;
    std::vector<MgfModel> marginals_;
    std::vector<double> q_;
    std::shared_ptr<const Eigen::MatrixXd> samples_;
    double max_row_norm_ = 0.0;
};

// exp(log_mgf(lambda)); +infinity marker outside the finiteness radius.
double mgf_joint_eval(const MultivariateMgf& model, const Eigen::VectorXd& lambda);

// prod_i exp(log_mgf_i(q_i lambda_i) / q_i) -- the Holder upper bound on the
// joint MGF; +infinity if any factor diverges.
double holder_mgf_bound(const std::vector<MgfModel>& marginals, const Eigen::VectorXd& lambda,
                        const HolderWeights& q);

}  // namespace tailbound
