#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

namespace testing {

inline std::filesystem::path data_dir() { return VULNRANK_DATA_DIR; }
inline std::filesystem::path odu_dir() { return data_dir() / "fixtures" / "odu_2021w47"; }
inline std::filesystem::path synthetic_dir() { return data_dir() / "synthetic"; }

// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag)
    {
        static std::uint64_t counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("vulnrank_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text)
{
    std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << text;
}

// Seeded generator with the few draws the property tests need.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_{seed} {}

    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }

    template <typename T>
    const T& pick(const std::vector<T>& v)
    {
        return v[static_cast<std::size_t>(integer(0, static_cast<int>(v.size()) - 1))];
    }

    std::vector<int> gains(std::size_t max_len, int max_gain)
    {
        std::vector<int> g(static_cast<std::size_t>(integer(0, static_cast<int>(max_len))));
        for (auto& x : g) {
            x = integer(0, max_gain);
        }
        return g;
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

// Textbook DCG, written out separately from the library.
inline double reference_dcg(const std::vector<int>& gains, int k)
{
    double sum = 0.0;
    for (int i = 1; i <= k && i <= static_cast<int>(gains.size()); ++i) {
        sum += (std::pow(2.0, gains[static_cast<std::size_t>(i - 1)]) - 1.0) / (std::log(i + 1.0) / std::log(2.0));
    }
    return sum;
}

// nDCG whose normalizer is the best DCG over every permutation.
inline double brute_force_ndcg(const std::vector<int>& gains, int k)
{
    std::vector<int> perm = gains;
    std::sort(perm.begin(), perm.end());
    double best = 0.0;
    do {
        best = std::max(best, reference_dcg(perm, k));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best == 0.0 ? 1.0 : reference_dcg(gains, k) / best;
}

inline double t_pdf(double x, double df)
{
    const double log_c = std::lgamma((df + 1.0) / 2.0) - std::lgamma(df / 2.0) - 0.5 * std::log(df * M_PI);
    return std::exp(log_c - (df + 1.0) / 2.0 * std::log1p(x * x / df));
}

inline double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                      double whole, double tol, int depth)
{
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) {
        return left + right + (left + right - whole) / 15.0;
    }
    return simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

// P(T <= t) by adaptive Simpson integration of the density from 0 to |t|.
inline double integrated_t_cdf(double t, double df)
{
    const auto f = [df](double x) { return t_pdf(x, df); };
    const double b = std::abs(t);
    if (b == 0.0) {
        return 0.5;
    }
    const double fa = f(0.0);
    const double fb = f(b);
    const double fm = f(b / 2.0);
    const double whole = b / 6.0 * (fa + 4.0 * fm + fb);
    const double area = simpson(f, 0.0, b, fa, fm, fb, whole, 1e-14, 50);
    return t > 0 ? 0.5 + area : 0.5 - area;
}

}  // namespace testing
