#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace kuramoto {

// Adaptive Simpson on [a, b].
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10, int max_depth = 40);

// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

// Integral over S^1 embedded as angles in [0, 2*pi).
double integrate_circle(const std::function<double(double)>& f, double tol = 1e-10);

// Integral over S^2 (unnormalized surface measure), Gauss x trapezoid grid.
double integrate_sphere2(const std::function<double(const Eigen::Vector3d&)>& f,
                         int n_polar = 96, int n_azimuth = 192);

// Integral over S^3 in R^4, layered product grid.
double integrate_sphere3(const std::function<double(const Eigen::Vector4d&)>& f,
                         int n_chi = 64, int n_polar = 64, int n_azimuth = 128);

// Surface area of S^{d-1}.
double sphere_area(int d);

}  // namespace kuramoto
