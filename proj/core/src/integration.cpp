#include "fqhe/integration.hpp"

#include <array>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

namespace fqhe {

int worker_count() {
    if (const char* env = std::getenv("FQHE_THREADS")) {
        const long n = std::strtol(env, nullptr, 10);
        if (n >= 1) return static_cast<int>(n);
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

namespace {

constexpr long long kBlockSize = 4096;

using BlockBody = std::function<void(long long, long long, std::span<detail::CompensatedCSum>)>;

// Deterministic blocked map-reduce over the index range [0, total). Each
// worker obtains its own body closure from the factory (so integrand scratch
// buffers are never shared across threads); block results are combined in
// index order afterwards, so the final sums do not depend on how blocks were
// scheduled onto threads.
void blocked_reduce(long long total, int n_acc,
                    const std::function<BlockBody()>& make_body,
                    std::span<detail::CompensatedCSum> out) {
    const long long n_blocks = (total + kBlockSize - 1) / kBlockSize;
    std::vector<cplx> partials(static_cast<std::size_t>(n_blocks) * n_acc);

    auto run_block = [&](BlockBody& body, long long block) {
        const long long first = block * kBlockSize;
        const long long last = std::min(total, first + kBlockSize);
        std::vector<detail::CompensatedCSum> acc(static_cast<std::size_t>(n_acc));
        body(first, last, acc);
        for (int i = 0; i < n_acc; ++i)
            partials[static_cast<std::size_t>(block) * n_acc + i] = acc[i].value();
    };

    const int workers = std::min<long long>(worker_count(), n_blocks);
    if (workers <= 1) {
        BlockBody body = make_body();
        for (long long block = 0; block < n_blocks; ++block) run_block(body, block);
    } else {
        std::atomic<long long> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                BlockBody body = make_body();
                for (;;) {
                    const long long block = next.fetch_add(1);
                    if (block >= n_blocks) return;
                    run_block(body, block);
                }
            });
        for (auto& th : pool) th.join();
    }

    for (long long block = 0; block < n_blocks; ++block)
        for (int i = 0; i < n_acc; ++i)
            out[static_cast<std::size_t>(i)].add(
                partials[static_cast<std::size_t>(block) * n_acc + i]);
}

long long checked_grid_size(const GridSpec& grid) {
    if (grid.dims < 1) throw InvalidInput("GridSpec: dims must be >= 1");
    if (grid.points_per_axis < 2) throw InvalidInput("GridSpec: points_per_axis must be >= 2");
    long long total = 1;
    for (int d = 0; d < grid.dims; ++d) {
        total *= grid.points_per_axis;
        if (total > grid.max_evaluations)
            throw GridTooLarge("torus_quadrature: N^dims exceeds the evaluation cap");
    }
    return total;
}

} // namespace

std::vector<IntegrationResult> torus_quadrature_multi(const VectorIntegrand& integrand,
                                                      int n_out, const GridSpec& grid) {
    if (n_out < 1) throw InvalidInput("torus_quadrature_multi: n_out must be >= 1");
    const long long total = checked_grid_size(grid);
    const int n = grid.points_per_axis;
    const int d = grid.dims;
    const bool richardson = (n % 2 == 0);

    // Accumulators: n_out full-grid sums followed by n_out coarse-subgrid
    // sums (indices even along every axis reproduce the N/2 rule exactly).
    const int n_acc = richardson ? 2 * n_out : n_out;
    std::vector<detail::CompensatedCSum> sums(static_cast<std::size_t>(n_acc));

    blocked_reduce(
        total, n_acc,
        [&]() -> BlockBody {
            return [fn = integrand, n, d, n_out, richardson,
                    point = std::vector<double>(static_cast<std::size_t>(d)),
                    values = std::vector<cplx>(static_cast<std::size_t>(n_out))](
                       long long first, long long last,
                       std::span<detail::CompensatedCSum> acc) mutable {
                for (long long idx = first; idx < last; ++idx) {
                    long long rest = idx;
                    bool coarse = richardson;
                    for (int k = d - 1; k >= 0; --k) {
                        const long long digit = rest % n;
                        rest /= n;
                        point[static_cast<std::size_t>(k)] =
                            static_cast<double>(digit) / static_cast<double>(n);
                        if (digit % 2 != 0) coarse = false;
                    }
                    fn(point, values);
                    for (int i = 0; i < n_out; ++i)
                        acc[static_cast<std::size_t>(i)].add(values[static_cast<std::size_t>(i)]);
                    if (coarse)
                        for (int i = 0; i < n_out; ++i)
                            acc[static_cast<std::size_t>(n_out + i)].add(
                                values[static_cast<std::size_t>(i)]);
                }
            };
        },
        sums);

    const double fine_scale = 1.0 / static_cast<double>(total);
    double coarse_scale = 1.0;
    for (int k = 0; k < d; ++k) coarse_scale /= static_cast<double>(n / 2);

    std::vector<IntegrationResult> results(static_cast<std::size_t>(n_out));
    for (int i = 0; i < n_out; ++i) {
        IntegrationResult& r = results[static_cast<std::size_t>(i)];
        r.backend = IntegrationBackend::grid;
        r.evaluations = total;
        r.value = sums[static_cast<std::size_t>(i)].value() * fine_scale;
        if (richardson) {
            const cplx coarse = sums[static_cast<std::size_t>(n_out + i)].value() * coarse_scale;
            r.error_estimate = std::abs(r.value - coarse);
            r.error_reliable = true;
        } else {
            r.error_estimate = 0.0;
            r.error_reliable = false;
        }
    }
    return results;
}

IntegrationResult torus_quadrature(const ScalarIntegrand& integrand, const GridSpec& grid) {
    auto res = torus_quadrature_multi(
        [&](std::span<const double> u, std::span<cplx> out) { out[0] = integrand(u); }, 1,
        grid);
    return res.front();
}

// ---------------------------------------------------------------------------
// Randomized digital sequence

namespace {

constexpr int kSobolBits = 53;
constexpr int kSobolMaxDims = 16;

struct SobolDims {
    int s;
    std::uint32_t a;
    std::array<std::uint64_t, 6> m;
};

// Degree / polynomial / initial direction numbers of the classic Joe-Kuo
// table, dimensions 2..16 (dimension 1 is the van der Corput sequence).
constexpr std::array<SobolDims, 15> kSobolTable{{
    {1, 0, {1}},
    {2, 1, {1, 3}},
    {3, 1, {1, 3, 1}},
    {3, 2, {1, 1, 1}},
    {4, 1, {1, 1, 3, 3}},
    {4, 4, {1, 3, 5, 13}},
    {5, 2, {1, 1, 5, 5, 17}},
    {5, 4, {1, 1, 5, 5, 5}},
    {5, 7, {1, 1, 7, 11, 19}},
    {5, 11, {1, 1, 5, 1, 1}},
    {5, 13, {1, 1, 1, 3, 11}},
    {5, 14, {1, 1, 1, 7, 31}},
    {6, 1, {1, 3, 3, 9, 9, 45}},
    {6, 13, {1, 1, 3, 13, 11, 35}},
    {6, 16, {1, 1, 7, 13, 25, 5}},
}};

class SobolSequence {
public:
    explicit SobolSequence(int dims) : dims_(dims) {
        if (dims < 1 || dims > kSobolMaxDims)
            throw InvalidInput("qmc_integrate: dims must be in [1, 16]");
        for (int d = 0; d < dims; ++d) {
            auto& v = v_[static_cast<std::size_t>(d)];
            if (d == 0) {
                for (int i = 1; i <= kSobolBits; ++i)
                    v[static_cast<std::size_t>(i)] = 1ULL << (kSobolBits - i);
                continue;
            }
            const SobolDims& row = kSobolTable[static_cast<std::size_t>(d - 1)];
            const int s = row.s;
            for (int i = 1; i <= s; ++i)
                v[static_cast<std::size_t>(i)] = row.m[static_cast<std::size_t>(i - 1)]
                                                 << (kSobolBits - i);
            for (int i = s + 1; i <= kSobolBits; ++i) {
                std::uint64_t value = v[static_cast<std::size_t>(i - s)] ^
                                      (v[static_cast<std::size_t>(i - s)] >> s);
                for (int k = 1; k < s; ++k)
                    if ((row.a >> (s - 1 - k)) & 1U) value ^= v[static_cast<std::size_t>(i - k)];
                v[static_cast<std::size_t>(i)] = value;
            }
        }
    }

    /// Digits of point `index`, computed directly via the Gray code of the
    /// index (random access keeps the blocked reduction deterministic).
    void point_bits(std::uint64_t index, std::span<std::uint64_t> out) const {
        for (int d = 0; d < dims_; ++d) out[static_cast<std::size_t>(d)] = 0;
        std::uint64_t gray = index ^ (index >> 1);
        for (int bit = 0; gray != 0; ++bit, gray >>= 1)
            if (gray & 1ULL)
                for (int d = 0; d < dims_; ++d)
                    out[static_cast<std::size_t>(d)] ^=
                        v_[static_cast<std::size_t>(d)][static_cast<std::size_t>(bit + 1)];
    }

private:
    int dims_;
    std::array<std::array<std::uint64_t, kSobolBits + 1>, kSobolMaxDims> v_{};
};

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace

std::vector<IntegrationResult> qmc_integrate_multi(const VectorIntegrand& integrand,
                                                   int n_out, int dims, long long samples,
                                                   std::uint64_t seed, int replicates) {
    if (n_out < 1) throw InvalidInput("qmc_integrate_multi: n_out must be >= 1");
    if (samples < 2) throw InvalidInput("qmc_integrate: samples must be >= 2");
    if (replicates < 2) throw InvalidInput("qmc_integrate: replicates must be >= 2");
    if (samples >= (1LL << 48)) throw InvalidInput("qmc_integrate: samples too large");

    const SobolSequence sobol(dims);

    // Replicate means, each a deterministic blocked compensated sum.
    std::vector<std::vector<cplx>> means(static_cast<std::size_t>(replicates));
    for (int r = 0; r < replicates; ++r) {
        std::uint64_t state = seed ^ (0xA0761D6478BD642FULL * static_cast<std::uint64_t>(r + 1));
        std::vector<std::uint64_t> shift(static_cast<std::size_t>(dims));
        for (int d = 0; d < dims; ++d)
            shift[static_cast<std::size_t>(d)] = splitmix64(state) >> (64 - kSobolBits);

        std::vector<detail::CompensatedCSum> sums(static_cast<std::size_t>(n_out));
        blocked_reduce(
            samples, n_out,
            [&]() -> BlockBody {
                return [fn = integrand, &sobol, &shift, dims, n_out,
                        bits = std::vector<std::uint64_t>(static_cast<std::size_t>(dims)),
                        point = std::vector<double>(static_cast<std::size_t>(dims)),
                        values = std::vector<cplx>(static_cast<std::size_t>(n_out))](
                           long long first, long long last,
                           std::span<detail::CompensatedCSum> acc) mutable {
                    for (long long i = first; i < last; ++i) {
                        sobol.point_bits(static_cast<std::uint64_t>(i), bits);
                        for (int d = 0; d < dims; ++d)
                            point[static_cast<std::size_t>(d)] =
                                static_cast<double>(bits[static_cast<std::size_t>(d)] ^
                                                    shift[static_cast<std::size_t>(d)]) *
                                0x1.0p-53;
                        fn(point, values);
                        for (int k = 0; k < n_out; ++k)
                            acc[static_cast<std::size_t>(k)].add(
                                values[static_cast<std::size_t>(k)]);
                    }
                };
            },
            sums);

        auto& mean = means[static_cast<std::size_t>(r)];
        mean.resize(static_cast<std::size_t>(n_out));
        for (int k = 0; k < n_out; ++k)
            mean[static_cast<std::size_t>(k)] =
                sums[static_cast<std::size_t>(k)].value() / static_cast<double>(samples);
    }

    std::vector<IntegrationResult> results(static_cast<std::size_t>(n_out));
    for (int k = 0; k < n_out; ++k) {
        detail::CompensatedCSum total;
        for (int r = 0; r < replicates; ++r)
            total.add(means[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)]);
        const cplx value = total.value() / static_cast<double>(replicates);

        detail::CompensatedSum var;
        for (int r = 0; r < replicates; ++r) {
            const double dev =
                std::abs(means[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)] - value);
            var.add(dev * dev);
        }
        IntegrationResult& res = results[static_cast<std::size_t>(k)];
        res.backend = IntegrationBackend::lowdiscrepancy;
        res.value = value;
        res.error_estimate = std::sqrt(var.value() / static_cast<double>(replicates - 1));
        res.error_reliable = true;
        res.evaluations = samples * replicates;
    }
    return results;
}

IntegrationResult qmc_integrate(const ScalarIntegrand& integrand, int dims,
                                long long samples, std::uint64_t seed, int replicates) {
    auto res = qmc_integrate_multi(
        [&](std::span<const double> u, std::span<cplx> out) { out[0] = integrand(u); }, 1,
        dims, samples, seed, replicates);
    return res.front();
}

} // namespace fqhe
