#include "freeprob/cumulants.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace freeprob {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Partitions of a contiguous segment of given length (elements 1..len),
// built by recursion on the block containing the first element: the gaps
// between its members are independent shorter segments.
std::vector<NonCrossingPartition> nc_of_length(int len);

void emit_with_gaps(const std::vector<int>& block, const std::vector<std::pair<int, int>>& gaps,
                    std::vector<NonCrossingPartition>& out) {
    std::vector<std::vector<NonCrossingPartition>> gap_parts;
    gap_parts.reserve(gaps.size());
    for (auto [off, glen] : gaps) {
        (void)off;
        gap_parts.push_back(nc_of_length(glen));
    }
    std::vector<size_t> idx(gaps.size(), 0);
    while (true) {
        NonCrossingPartition p;
        p.blocks.push_back(block);
        for (size_t gi = 0; gi < gaps.size(); ++gi) {
            int off = gaps[gi].first;
            for (const auto& b : gap_parts[gi][idx[gi]].blocks) {
                std::vector<int> shifted;
                shifted.reserve(b.size());
                for (int e : b) shifted.push_back(e + off);
                p.blocks.push_back(std::move(shifted));
            }
        }
        out.push_back(std::move(p));
        size_t gi = 0;
        for (; gi < gaps.size(); ++gi) {
            if (++idx[gi] < gap_parts[gi].size()) break;
            idx[gi] = 0;
        }
        if (gi == gaps.size()) break;
        if (gaps.empty()) break;
    }
}

void grow_first_block(int len, int last, std::vector<int>& block,
                      std::vector<std::pair<int, int>>& gaps,
                      std::vector<NonCrossingPartition>& out) {
    // close the block here; the tail (last+1 .. len) is one more gap
    if (last < len) {
        gaps.emplace_back(last, len - last);
        emit_with_gaps(block, gaps, out);
        gaps.pop_back();
    } else {
        emit_with_gaps(block, gaps, out);
    }
    // or extend the block with a later element
    for (int nxt = last + 1; nxt <= len; ++nxt) {
        block.push_back(nxt);
        if (nxt > last + 1) gaps.emplace_back(last, nxt - 1 - last);
        grow_first_block(len, nxt, block, gaps, out);
        if (nxt > last + 1) gaps.pop_back();
        block.pop_back();
    }
}

std::vector<NonCrossingPartition> nc_of_length(int len) {
    static std::vector<std::vector<NonCrossingPartition>> cache(1);  // cache[0] = { {} }
    if (cache[0].empty()) cache[0].push_back(NonCrossingPartition{});
    if (len < static_cast<int>(cache.size()) && !cache[len].empty()) return cache[len];
    if (len >= static_cast<int>(cache.size())) cache.resize(len + 1);
    for (int L = 1; L <= len; ++L) {
        if (!cache[L].empty()) continue;
        std::vector<NonCrossingPartition> out;
        std::vector<int> block{1};
        std::vector<std::pair<int, int>> gaps;
        grow_first_block(L, 1, block, gaps, out);
        cache[L] = std::move(out);
    }
    return cache[len];
}

// power-series coefficients of the moment generating function M(z) up to z^k:
// m_j = sum_{m>=1} alpha_m [z^{j-m}] M(z)^{2m}
template <typename T>
std::vector<T> moment_series(const std::vector<T>& alpha, int k) {
    int n = static_cast<int>(alpha.size());
    std::vector<T> m(k + 1, T(0));
    m[0] = T(1);
    for (int j = 1; j <= k; ++j) {
        T acc(0);
        for (int mm = 1; mm <= std::min(j, n); ++mm) {
            // [z^{j-mm}] M^{2mm}, using coefficients m_0..m_{j-1} already known
            int p = 2 * mm, target = j - mm;
            std::vector<T> pw(target + 1, T(0));
            pw[0] = T(1);
            for (int rep = 0; rep < p; ++rep) {
                std::vector<T> nx(target + 1, T(0));
                for (int a = 0; a <= target; ++a) {
                    if (pw[a] == T(0)) continue;
                    for (int b = 0; a + b <= target; ++b) nx[a + b] += pw[a] * m[b];
                }
                pw = std::move(nx);
            }
            acc += alpha[mm - 1] * pw[target];
        }
        m[j] = acc;
    }
    return m;
}

}  // namespace

std::vector<NonCrossingPartition> enumerate_nc(int n) {
    if (n < 1 || n > 14) throw ParameterError("enumerate_nc supports 1 <= n <= 14");
    return nc_of_length(n);
}

bool is_noncrossing(const NonCrossingPartition& p) {
    for (size_t i = 0; i < p.blocks.size(); ++i) {
        for (size_t j = 0; j < p.blocks.size(); ++j) {
            if (i == j) continue;
            // a < b < c with a,c in block i and b in block j, and some d > c in j
            // or d < a in j: full quadruple check
            for (int a : p.blocks[i])
                for (int c : p.blocks[i]) {
                    if (a >= c) continue;
                    for (int b : p.blocks[j])
                        for (int d : p.blocks[j]) {
                            if (b >= d) continue;
                            if (a < b && b < c && c < d) return false;
                        }
                }
        }
    }
    return true;
}

double moments_from_alpha(const AlphaSeries& alpha, int k) {
    if (k < 0) throw ParameterError("moment order must be >= 0");
    if (k > alpha.order())
        throw TruncationError("moment order exceeds the available alpha coefficients");
    return moment_series(alpha.coefficients, k)[k];
}

std::int64_t moments_from_alpha_exact(const std::vector<std::int64_t>& alpha, int k) {
    if (k < 0) throw ParameterError("moment order must be >= 0");
    if (k > static_cast<int>(alpha.size()))
        throw TruncationError("moment order exceeds the available alpha coefficients");
    return moment_series(alpha, k)[k];
}

cplx f_series_eval(const AlphaSeries& alpha, cplx z) {
    cplx acc = 0.0, p = 1.0;
    for (double a : alpha.coefficients) {
        p *= z;
        acc += a * p;
    }
    return acc;
}

AlphaSeries alpha_from_phiphi(TransformEngine& eng, double support_radius, int N) {
    if (N < 1 || N > 8) throw ParameterError("alpha extraction supports 1 <= N <= 8");
    const int M = 32;
    double r = 0.05 / std::max(support_radius, 0.5);
    // h(z) = z * phiphi(1/z) = sum alpha_n z^n, resolved by DFT on |z| = r
    std::vector<cplx> h(M);
    for (int j = 0; j < M; ++j) {
        double th = 2.0 * kPi * j / M;
        cplx z = r * cplx(std::cos(th), std::sin(th));
        h[j] = z * eng.phiphi(1.0 / z);
    }
    AlphaSeries out;
    double max_imag = 0.0, max_abs = 0.0;
    for (int n = 1; n <= N; ++n) {
        cplx c = 0.0;
        for (int j = 0; j < M; ++j) {
            double th = -2.0 * kPi * j * n / M;
            c += h[j] * cplx(std::cos(th), std::sin(th));
        }
        c /= static_cast<double>(M) * std::pow(r, n);
        out.coefficients.push_back(c.real());
        max_imag = std::max(max_imag, std::abs(c.imag()));
        max_abs = std::max(max_abs, std::abs(c));
    }
    if (max_imag > 1e-6 * (1.0 + max_abs))
        throw CalibrationError("alpha extraction residual too large (imaginary leakage)");
    return out;
}

AlphaSeries alpha_from_phiphi(const Measure& mu, int N, const InversionConfig& cfg) {
    TransformEngine eng(mu, cfg);
    return alpha_from_phiphi(eng, mu.support_radius(), N);
}

std::vector<double> real_part_cumulants(const AlphaSeries& alpha) {
    std::vector<double> k(2 * alpha.order(), 0.0);
    for (int n = 1; n <= alpha.order(); ++n)
        k[2 * n - 1] = alpha.coefficients[n - 1] * std::pow(2.0, 1.0 - 2.0 * n);
    return k;
}

std::vector<double> free_cumulants_from_moments(const std::vector<double>& moments) {
    int n = static_cast<int>(moments.size());
    if (n > 12) throw ParameterError("cumulant inversion supports at most 12 moments");
    std::vector<double> k(n, 0.0);
    for (int j = 1; j <= n; ++j) {
        double rest = 0.0;
        for (const auto& p : enumerate_nc(j)) {
            if (p.blocks.size() == 1) continue;  // the full block carries k_j itself
            double prod = 1.0;
            for (const auto& b : p.blocks) prod *= k[b.size() - 1];
            rest += prod;
        }
        k[j - 1] = moments[j - 1] - rest;
    }
    return k;
}

}  // namespace freeprob
