#include <doctest.h>

#include <vector>

#include "fairbench/error.hpp"
#include "fairbench/kernels.hpp"
#include "fairbench/rng.hpp"
#include "support.hpp"

using namespace fairbench;
using kernels::Backend;

namespace {

std::vector<double> random_vector(Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(-10.0, 10.0);
    return v;
}

std::vector<Backend> available() {
    std::vector<Backend> out;
    for (auto b : {Backend::scalar, Backend::avx2, Backend::neon}) {
        if (kernels::backend_supported(b)) out.push_back(b);
    }
    return out;
}

}  // namespace

TEST_CASE("scalar kernels compute the textbook values") {
    const std::vector<double> a{1, 2, 3}, b{4, 5, 6};
    CHECK(kernels::scalar::dot(a.data(), b.data(), 3) == 32.0);
    CHECK(kernels::scalar::sum(a.data(), 3) == 6.0);
    std::vector<double> y{1, 1, 1};
    kernels::scalar::axpy(2.0, a.data(), y.data(), 3);
    CHECK(y == std::vector<double>{3, 5, 7});
    kernels::scalar::scale(0.5, y.data(), 3);
    CHECK(y == std::vector<double>{1.5, 2.5, 3.5});
    CHECK(kernels::scalar::dot(a.data(), b.data(), 0) == 0.0);
}

TEST_CASE("every available backend matches the scalar reference") {
    Rng rng(11);
    const auto& ref = kernels::table(Backend::scalar);
    for (Backend backend : available()) {
        CAPTURE(kernels::backend_name(backend));
        const auto& t = kernels::table(backend);
        for (std::size_t n = 0; n < 70; ++n) {
            const auto a = random_vector(rng, n);
            const auto b = random_vector(rng, n);
            // Reassociation error is bounded by n * eps * sum of magnitudes.
            double abs_dot = 0.0, abs_sum = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                abs_dot += std::fabs(a[i] * b[i]);
                abs_sum += std::fabs(a[i]);
            }
            const double eps = 2.3e-16 * static_cast<double>(n + 1);
            CHECK(support::near(t.dot(a.data(), b.data(), n), ref.dot(a.data(), b.data(), n), eps * abs_dot));
            CHECK(support::near(t.sum(a.data(), n), ref.sum(a.data(), n), eps * abs_sum));

            auto y1 = b, y2 = b;
            t.axpy(0.37, a.data(), y1.data(), n);
            ref.axpy(0.37, a.data(), y2.data(), n);
            for (std::size_t i = 0; i < n; ++i) CHECK(support::near(y1[i], y2[i], 1e-12));

            auto s1 = a, s2 = a;
            t.scale(-1.7, s1.data(), n);
            ref.scale(-1.7, s2.data(), n);
            for (std::size_t i = 0; i < n; ++i) CHECK(s1[i] == s2[i]);
        }
    }
}

TEST_CASE("a backend is deterministic across calls") {
    Rng rng(5);
    const auto a = random_vector(rng, 1001), b = random_vector(rng, 1001);
    for (Backend backend : available()) {
        const auto& t = kernels::table(backend);
        CHECK(t.dot(a.data(), b.data(), a.size()) == t.dot(a.data(), b.data(), a.size()));
    }
}

TEST_CASE("switching backends") {
    const Backend original = kernels::active_backend();
    kernels::set_backend(Backend::scalar);
    CHECK(kernels::active_backend() == Backend::scalar);
    const std::vector<double> a{1, 2}, b{3, 4};
    CHECK(kernels::dot(a, b) == 11.0);
    for (auto b2 : {Backend::avx2, Backend::neon}) {
        if (!kernels::backend_supported(b2)) CHECK_THROWS_AS(kernels::set_backend(b2), InvalidArgument);
    }
    kernels::set_backend(original);
    CHECK(kernels::backend_name(Backend::avx2) == "avx2");
}
