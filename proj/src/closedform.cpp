// SPDX-License-Identifier: Apache-2.0

#include "scmimo/closedform.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace scmimo {

namespace {

void require_same_rows(const CMatrix& a, Eigen::Index rows, const char* what)
{
    if (a.rows() != rows)
        throw std::invalid_argument(what);
}

void check_terminal(int l, std::size_t L, const char* what)
{
    if (l < 0 || static_cast<std::size_t>(l) >= L)
        throw std::out_of_range(what);
}

} // namespace

double gram_trace_squared(const CMatrix& A)
{
    const CMatrix gram = A.adjoint() * A;
    return gram.squaredNorm();
}

double cross_trace(const CMatrix& A_l, const CMatrix& A_k)
{
    require_same_rows(A_k, A_l.rows(), "cross_trace: steering matrices of different array sizes");
    const CMatrix c = A_k.adjoint() * A_l;
    return c.squaredNorm();
}

double projected_energy(const CMatrix& A, const CVector& x)
{
    if (A.rows() != x.size())
        throw std::invalid_argument("projected_energy: dimension mismatch");
    return (A.adjoint() * x).squaredNorm();
}

double delta_l(const SteeringMatrix& A, const CVector& h_bar, double k_factor)
{
    const auto& S = A.entries;
    if (S.rows() != h_bar.size())
        throw std::invalid_argument("delta_l: steering matrix and LoS vector differ in length");
    const double M = static_cast<double>(S.rows());
    const double P = static_cast<double>(S.cols());
    const RiceWeights w = rice_weights(k_factor, static_cast<int>(S.cols()));
    const double d2 = w.diffuse * w.diffuse;
    const double s2 = w.specular * w.specular;

    double out = s2 * s2 * M * M;
    if (d2 != 0.0) {
        out += d2 * d2 * (P * P * M * M + gram_trace_squared(S));
        out += 2.0 * P * M * M * d2 * s2;
        if (s2 != 0.0)
            out += 2.0 * d2 * s2 * projected_energy(S, h_bar);
    }
    return out;
}

double varphi_lk(const SteeringMatrix& A_l, const SteeringMatrix& A_k, const CVector& h_bar_l,
                 const CVector& h_bar_k, double k_l, double k_k)
{
    const auto M = A_l.entries.rows();
    require_same_rows(A_k.entries, M, "varphi_lk: terminals use different array sizes");
    if (h_bar_l.size() != M || h_bar_k.size() != M)
        throw std::invalid_argument("varphi_lk: LoS vector length mismatch");
    const RiceWeights wl = rice_weights(k_l, static_cast<int>(A_l.entries.cols()));
    const RiceWeights wk = rice_weights(k_k, static_cast<int>(A_k.entries.cols()));
    const double dl = wl.diffuse * wl.diffuse, sl = wl.specular * wl.specular;
    const double dk = wk.diffuse * wk.diffuse, sk = wk.specular * wk.specular;

    double out = 0.0;
    if (dl * dk != 0.0)
        out += dl * dk * cross_trace(A_l.entries, A_k.entries);
    if (dl * sk != 0.0)
        out += dl * sk * projected_energy(A_l.entries, h_bar_k);
    if (sl * dk != 0.0)
        out += sl * dk * projected_energy(A_k.entries, h_bar_l);
    if (sl * sk != 0.0)
        out += sl * sk * std::norm(h_bar_l.dot(h_bar_k));
    return out;
}

double chi_l(double k_factor, int num_paths, int num_antennas)
{
    const RiceWeights w = rice_weights(k_factor, num_paths);
    return static_cast<double>(num_antennas)
           * (static_cast<double>(num_paths) * w.diffuse * w.diffuse + w.specular * w.specular);
}

double delta_l(const PreparedLink& link)
{
    return delta_l(link.steering, link.specular, link.k_factor);
}

double varphi_lk(const PreparedLink& l, const PreparedLink& k)
{
    return varphi_lk(l.steering, k.steering, l.specular, k.specular, l.k_factor, k.k_factor);
}

MomentSet compute_moments(std::span<const PreparedLink> links)
{
    const auto L = static_cast<Eigen::Index>(links.size());
    MomentSet m;
    m.delta.reserve(links.size());
    m.chi.reserve(links.size());
    m.varphi = Eigen::MatrixXd::Zero(L, L);
    for (const auto& link : links) {
        m.delta.push_back(delta_l(link));
        m.chi.push_back(chi_l(link.k_factor, static_cast<int>(link.steering.entries.cols()),
                              static_cast<int>(link.steering.entries.rows())));
    }
    for (Eigen::Index l = 0; l < L; ++l)
        for (Eigen::Index k = 0; k < L; ++k)
            if (k != l)
                m.varphi(l, k) = varphi_lk(links[static_cast<std::size_t>(l)], links[static_cast<std::size_t>(k)]);
    return m;
}

namespace {

double interference_moment(const MomentSet& moments, std::span<const double> betas, int l)
{
    double s = 0.0;
    for (std::size_t k = 0; k < betas.size(); ++k)
        if (static_cast<int>(k) != l)
            s += betas[k] * moments.varphi(l, static_cast<Eigen::Index>(k));
    return s;
}

void check_moments(const MomentSet& moments, std::span<const double> betas, int l)
{
    if (moments.delta.size() != betas.size() || moments.chi.size() != betas.size()
        || static_cast<std::size_t>(moments.varphi.rows()) != betas.size())
        throw std::invalid_argument("moment set does not match the number of link gains");
    check_terminal(l, betas.size(), "terminal index out of range");
}

} // namespace

double theorem1_sinr(const MomentSet& moments, std::span<const double> betas, double snr, int l)
{
    check_moments(moments, betas, l);
    const auto i = static_cast<std::size_t>(l);
    return snr * betas[i] * moments.delta[i] / (moments.chi[i] + snr * interference_moment(moments, betas, l));
}

std::vector<double> theorem1_sinrs(const MomentSet& moments, std::span<const double> betas, double snr)
{
    std::vector<double> out(betas.size());
    for (std::size_t l = 0; l < betas.size(); ++l)
        out[l] = theorem1_sinr(moments, betas, snr, static_cast<int>(l));
    return out;
}

double theorem1_saturation(const MomentSet& moments, std::span<const double> betas, int l)
{
    check_moments(moments, betas, l);
    const double interference = interference_moment(moments, betas, l);
    if (interference <= 0.0)
        return std::numeric_limits<double>::infinity();
    return betas[static_cast<std::size_t>(l)] * moments.delta[static_cast<std::size_t>(l)] / interference;
}

double approx_sum_se(std::span<const double> betas, const MomentSet& moments, double snr)
{
    double s = 0.0;
    for (std::size_t l = 0; l < betas.size(); ++l)
        s += std::log2(1.0 + theorem1_sinr(moments, betas, snr, static_cast<int>(l)));
    return s;
}

double corollary1_sinr(std::span<const SteeringMatrix> steering, std::span<const double> betas, double snr,
                       int l, int num_paths, int num_antennas)
{
    if (steering.size() != betas.size())
        throw std::invalid_argument("corollary1_sinr: one steering matrix per terminal required");
    check_terminal(l, betas.size(), "corollary1_sinr: terminal index out of range");
    const double M = num_antennas;
    const double P = num_paths;
    const double w2 = 1.0 / P; // (eta')^2 with K = 0
    const auto& A_l = steering[static_cast<std::size_t>(l)].entries;

    const double numerator = snr * betas[static_cast<std::size_t>(l)] * w2 * w2 * (P * P * M * M + gram_trace_squared(A_l));
    double interference = 0.0;
    for (std::size_t k = 0; k < betas.size(); ++k)
        if (static_cast<int>(k) != l)
            interference += betas[k] * w2 * w2 * cross_trace(A_l, steering[k].entries);
    return numerator / (M * P * w2 + snr * interference);
}

double corollary2_sinr(const SteeringMatrix& A, std::span<const double> betas, double snr, int l, int num_paths,
                       int num_antennas)
{
    check_terminal(l, betas.size(), "corollary2_sinr: terminal index out of range");
    const double M = num_antennas;
    const double P = num_paths;
    const double w2 = 1.0 / P;
    const double T = gram_trace_squared(A.entries);

    const double numerator = snr * betas[static_cast<std::size_t>(l)] * w2 * w2 * (P * P * M * M + T);
    double beta_others = 0.0;
    for (std::size_t k = 0; k < betas.size(); ++k)
        if (static_cast<int>(k) != l)
            beta_others += betas[k];
    return numerator / (M * P * w2 + snr * beta_others * w2 * w2 * T);
}

double corollary3_sinr(const SteeringMatrix& A, std::span<const CVector> h_bars, std::span<const double> k_factors,
                       std::span<const double> betas, double snr, int l)
{
    if (h_bars.size() != betas.size() || k_factors.size() != betas.size())
        throw std::invalid_argument("corollary3_sinr: per-terminal inputs differ in length");
    check_terminal(l, betas.size(), "corollary3_sinr: terminal index out of range");
    const auto& S = A.entries;
    const double M = static_cast<double>(S.rows());
    const int P = static_cast<int>(S.cols());
    const auto li = static_cast<std::size_t>(l);

    const double T = gram_trace_squared(S);
    const RiceWeights wl = rice_weights(k_factors[li], P);
    const double dl = wl.diffuse * wl.diffuse, sl = wl.specular * wl.specular;
    const double own_projection = projected_energy(S, h_bars[li]);

    double interference = 0.0;
    for (std::size_t k = 0; k < betas.size(); ++k) {
        if (k == li)
            continue;
        const RiceWeights wk = rice_weights(k_factors[k], P);
        const double dk = wk.diffuse * wk.diffuse, sk = wk.specular * wk.specular;
        double v = dl * dk * T;
        if (dl * sk != 0.0)
            v += dl * sk * projected_energy(S, h_bars[k]);
        v += sl * dk * own_projection;
        v += sl * sk * M * M;
        interference += betas[k] * v;
    }
    const double delta = delta_l(A, h_bars[li], k_factors[li]);
    const double chi = chi_l(k_factors[li], P, static_cast<int>(S.rows()));
    return snr * betas[li] * delta / (chi + snr * interference);
}

} // namespace scmimo
