#pragma once

#include <Eigen/Dense>
#include <functional>

namespace kuramoto {

// Nelder-Mead simplex minimizer; returns the best objective value found.
// Used for the small likelihood fits where no closed form exists.
double nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd& x,
                   double initial_scale = 0.25, int max_iter = 2000, double tol = 1e-12);

}  // namespace kuramoto
