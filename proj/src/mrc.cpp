// SPDX-License-Identifier: Apache-2.0

#include "scmimo/mrc.hpp"
#include "scmimo/parallel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace scmimo {

std::string_view method_name(Method m)
{
    switch (m) {
    case Method::MonteCarlo: return "MonteCarlo";
    case Method::Theorem1: return "Theorem1";
    case Method::Theorem2: return "Theorem2";
    case Method::FullLimit: return "FullLimit";
    case Method::Corollary1: return "Corollary1";
    case Method::Corollary2: return "Corollary2";
    case Method::Corollary3: return "Corollary3";
    }
    return "?";
}

Method method_from_name(std::string_view name)
{
    for (Method m : {Method::MonteCarlo, Method::Theorem1, Method::Theorem2, Method::FullLimit,
                     Method::Corollary1, Method::Corollary2, Method::Corollary3})
        if (method_name(m) == name)
            return m;
    throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

namespace {

void check_sizes(Eigen::Index L, std::size_t n_betas)
{
    if (static_cast<std::size_t>(L) != n_betas)
        throw std::invalid_argument("number of link gains does not match the channel matrix");
}

double sinr_from_gram_row(const CMatrix& gram, std::span<const double> betas, double snr, Eigen::Index l,
                          double noise_power)
{
    const double norm2 = gram(l, l).real();
    if (norm2 <= 0.0)
        return 0.0;
    double interference = 0.0;
    for (Eigen::Index k = 0; k < gram.cols(); ++k)
        if (k != l)
            interference += betas[static_cast<std::size_t>(k)] * std::norm(gram(l, k));
    return snr * betas[static_cast<std::size_t>(l)] * norm2 * norm2
           / (noise_power * norm2 + snr * interference);
}

} // namespace

double instantaneous_sinr(const CMatrix& G, std::span<const double> betas, double snr, int l, double noise_power)
{
    check_sizes(G.cols(), betas.size());
    if (l < 0 || l >= G.cols())
        throw std::out_of_range("instantaneous_sinr: terminal index out of range");
    if (snr < 0.0)
        throw std::invalid_argument("instantaneous_sinr: negative SNR");
    const CMatrix gram = G.adjoint() * G;
    return sinr_from_gram_row(gram, betas, snr, l, noise_power);
}

std::vector<double> sinrs_from_gram(const CMatrix& gram, std::span<const double> betas, double snr,
                                    double noise_power)
{
    check_sizes(gram.cols(), betas.size());
    std::vector<double> out(static_cast<std::size_t>(gram.cols()));
    for (Eigen::Index l = 0; l < gram.cols(); ++l)
        out[static_cast<std::size_t>(l)] = sinr_from_gram_row(gram, betas, snr, l, noise_power);
    return out;
}

double sum_rate(std::span<const double> sinrs)
{
    double s = 0.0;
    for (double x : sinrs)
        s += std::log2(1.0 + x);
    return s;
}

double sum_spectral_efficiency(const CMatrix& G, std::span<const double> betas, double snr, double noise_power)
{
    check_sizes(G.cols(), betas.size());
    const CMatrix gram = G.adjoint() * G;
    return sum_rate(sinrs_from_gram(gram, betas, snr, noise_power));
}

void RunningMoments::add(double x)
{
    count += 1.0;
    const double d = x - mean;
    mean += d / count;
    m2 += d * (x - mean);
}

RunningMoments RunningMoments::merge(const RunningMoments& a, const RunningMoments& b)
{
    if (a.count == 0.0)
        return b;
    if (b.count == 0.0)
        return a;
    RunningMoments r;
    r.count = a.count + b.count;
    const double d = b.mean - a.mean;
    r.mean = a.mean + d * (b.count / r.count);
    r.m2 = a.m2 + b.m2 + d * d * (a.count * b.count / r.count);
    return r;
}

double RunningMoments::std_err() const
{
    if (count < 2.0)
        return 0.0;
    return std::sqrt(m2 / (count - 1.0) / count);
}

namespace {

// Per-SNR accumulators: L per-terminal SINRs, terminal average, sum SE.
struct SweepAccumulator {
    std::vector<std::vector<RunningMoments>> sinr; // [snr][terminal]
    std::vector<RunningMoments> avg;
    std::vector<RunningMoments> sum_se;

    SweepAccumulator() = default;
    SweepAccumulator(std::size_t n_snr, std::size_t L)
        : sinr(n_snr, std::vector<RunningMoments>(L)), avg(n_snr), sum_se(n_snr)
    {
    }

    static SweepAccumulator merge(const SweepAccumulator& a, const SweepAccumulator& b)
    {
        SweepAccumulator r = a;
        for (std::size_t s = 0; s < a.sinr.size(); ++s) {
            for (std::size_t l = 0; l < a.sinr[s].size(); ++l)
                r.sinr[s][l] = RunningMoments::merge(a.sinr[s][l], b.sinr[s][l]);
            r.avg[s] = RunningMoments::merge(a.avg[s], b.avg[s]);
            r.sum_se[s] = RunningMoments::merge(a.sum_se[s], b.sum_se[s]);
        }
        return r;
    }
};

} // namespace

std::vector<McPoint> mc_fading_sweep(std::span<const PreparedLink> links, std::span<const double> snrs,
                                     std::size_t n_real, const McOptions& opts)
{
    if (n_real < 1)
        throw std::invalid_argument("mc_fading_sweep: need at least one realization");
    if (links.empty())
        throw std::invalid_argument("mc_fading_sweep: no terminals");
    for (double s : snrs)
        if (s < 0.0)
            throw std::invalid_argument("mc_fading_sweep: negative SNR");

    const std::size_t L = links.size();
    std::vector<double> betas(L);
    for (std::size_t l = 0; l < L; ++l)
        betas[l] = links[l].beta;

    const std::size_t block = std::max<std::size_t>(1, opts.block_size);
    const std::size_t n_blocks = (n_real + block - 1) / block;
    std::vector<SweepAccumulator> partial(n_blocks);

    parallel_for(n_blocks, opts.threads, [&](std::size_t b) {
        SweepAccumulator acc(snrs.size(), L);
        const std::size_t end = std::min(n_real, (b + 1) * block);
        for (std::size_t r = b * block; r < end; ++r) {
            Rng rng = make_stream(opts.seed, {r});
            const CMatrix G = draw_channel_matrix(links, rng);
            const CMatrix gram = G.adjoint() * G;
            for (std::size_t s = 0; s < snrs.size(); ++s) {
                const auto sinr = sinrs_from_gram(gram, betas, snrs[s], opts.noise_power);
                double total = 0.0;
                for (std::size_t l = 0; l < L; ++l) {
                    acc.sinr[s][l].add(sinr[l]);
                    total += sinr[l];
                }
                acc.avg[s].add(total / static_cast<double>(L));
                acc.sum_se[s].add(sum_rate(sinr));
            }
        }
        partial[b] = std::move(acc);
    });

    const SweepAccumulator total = pairwise_reduce(std::move(partial), SweepAccumulator::merge);

    std::vector<McPoint> out(snrs.size());
    for (std::size_t s = 0; s < snrs.size(); ++s) {
        McPoint& p = out[s];
        p.snr = snrs[s];
        for (std::size_t l = 0; l < L; ++l) {
            p.sinr_mean.push_back(total.sinr[s][l].mean);
            p.sinr_std_err.push_back(total.sinr[s][l].std_err());
        }
        p.avg_sinr_mean = total.avg[s].mean;
        p.avg_sinr_std_err = total.avg[s].std_err();
        p.sum_se_mean = total.sum_se[s].mean;
        p.sum_se_std_err = total.sum_se[s].std_err();
    }
    return out;
}

namespace {

SinrReport report_from_point(const McPoint& p, std::size_t n_real)
{
    SinrReport r;
    r.method = Method::MonteCarlo;
    r.per_terminal_sinr = p.sinr_mean;
    r.sum_se_bits = p.sum_se_mean;
    r.mc_std_err = p.sinr_std_err;
    r.sum_se_std_err = p.sum_se_std_err;
    r.n_realizations = n_real;
    return r;
}

} // namespace

SinrReport mc_expected_sinr(const ArrayGeometry& geom, std::span<const TerminalLink> links, double snr,
                            std::size_t n_real, const McOptions& opts)
{
    const auto prepared = prepare_links(geom, links);
    const double snrs[] = {snr};
    return report_from_point(mc_fading_sweep(prepared, snrs, n_real, opts).front(), n_real);
}

SinrReport mc_ergodic_sum_se(const ArrayGeometry& geom, std::span<const TerminalLink> links, double snr,
                             std::size_t n_real, const McOptions& opts)
{
    // Both statistics come out of one sweep; the report is the same object,
    // with sum_se_bits being the ergodic estimate.
    return mc_expected_sinr(geom, links, snr, n_real, opts);
}

} // namespace scmimo
