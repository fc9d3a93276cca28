#include "kuramoto/optim.hpp"

#include <algorithm>
#include <vector>

namespace kuramoto {

double nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd& x,
                   double initial_scale, int max_iter, double tol) {
    using Eigen::VectorXd;
    const int n = static_cast<int>(x.size());
    std::vector<VectorXd> s(n + 1, x);
    std::vector<double> fs(n + 1);
    for (int i = 1; i <= n; ++i) s[i][i - 1] += initial_scale;
    for (int i = 0; i <= n; ++i) fs[i] = f(s[i]);

    auto order = [&]() {
        std::vector<int> idx(n + 1);
        for (int i = 0; i <= n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fs[a] < fs[b]; });
        std::vector<VectorXd> s2(n + 1);
        std::vector<double> f2(n + 1);
        for (int i = 0; i <= n; ++i) {
            s2[i] = s[idx[i]];
            f2[i] = fs[idx[i]];
        }
        s.swap(s2);
        fs.swap(f2);
    };

    for (int it = 0; it < max_iter; ++it) {
        order();
        if (std::abs(fs[n] - fs[0]) <= tol * (1.0 + std::abs(fs[0]))) break;
        VectorXd centroid = VectorXd::Zero(n);
        for (int i = 0; i < n; ++i) centroid += s[i];
        centroid /= n;

        VectorXd xr = centroid + (centroid - s[n]);
        double fr = f(xr);
        if (fr < fs[0]) {
            VectorXd xe = centroid + 2.0 * (centroid - s[n]);
            double fe = f(xe);
            if (fe < fr) { s[n] = xe; fs[n] = fe; }
            else { s[n] = xr; fs[n] = fr; }
        } else if (fr < fs[n - 1]) {
            s[n] = xr;
            fs[n] = fr;
        } else {
            VectorXd xc = centroid + 0.5 * (s[n] - centroid);
            double fc = f(xc);
            if (fc < fs[n]) { s[n] = xc; fs[n] = fc; }
            else {
                for (int i = 1; i <= n; ++i) {
                    s[i] = s[0] + 0.5 * (s[i] - s[0]);
                    fs[i] = f(s[i]);
                }
            }
        }
    }
    order();
    x = s[0];
    return fs[0];
}

}  // namespace kuramoto
