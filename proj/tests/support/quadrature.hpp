#pragma once

// Gauss-Hermite quadrature for the standard normal weight, nodes and weights
// from the Golub-Welsch eigenproblem of the probabilists' Jacobi matrix.
// Test-only oracle for expectations E f(theta + Z), Z ~ N(0, 1).

#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

namespace tscore::testing
{

class GaussHermite
{
public:
    explicit GaussHermite(int nodes = 200)
    {
        Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(nodes, nodes);
        for (int i = 1; i < nodes; ++i)
        {
            jacobi(i, i - 1) = std::sqrt(static_cast<double>(i));
            jacobi(i - 1, i) = jacobi(i, i - 1);
        }
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
        nodes_.resize(static_cast<std::size_t>(nodes));
        weights_.resize(static_cast<std::size_t>(nodes));
        for (int i = 0; i < nodes; ++i)
        {
            const double v = eig.eigenvectors()(0, i);
            nodes_[static_cast<std::size_t>(i)] = eig.eigenvalues()(i);
            weights_[static_cast<std::size_t>(i)] = v * v;
        }
    }

    // E f(theta + Z); weights sum to 1.
    template <typename F>
    [[nodiscard]] auto expect(double theta, F&& f) const -> double
    {
        double sum = 0.0;
        for (std::size_t i = 0; i < nodes_.size(); ++i)
        {
            sum += weights_[i] * f(theta + nodes_[i]);
        }
        return sum;
    }

private:
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

}  // namespace tscore::testing
