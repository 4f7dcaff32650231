#include <catch2/catch_amalgamated.hpp>

#include "dream/dream.hpp"
#include "oracles.hpp"

namespace {

dream::Mat random_mat(int r, int c, dream::SplitMix64& rng) {
    dream::Mat m(r, c);
    for (double& v : m.a) v = rng.next_uniform(-2.0, 2.0);
    return m;
}

dream::Mat transpose(const dream::Mat& m) {
    dream::Mat t(m.cols, m.rows);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) t(j, i) = m(i, j);
    return t;
}

void check_close(const dream::Mat& got, const dream::Mat& want, double tol) {
    REQUIRE(got.rows == want.rows);
    REQUIRE(got.cols == want.cols);
    for (std::size_t i = 0; i < got.a.size(); ++i)
        REQUIRE(got.a[i] == Catch::Approx(want.a[i]).margin(tol));
}

}  // namespace

TEST_CASE("matmul agrees with the dense triple-loop reference") {
    dream::SplitMix64 rng(17);
    for (auto [r, k, c] : {std::tuple{3, 4, 5}, {1, 7, 2}, {6, 1, 6}, {8, 8, 8}}) {
        const auto a = random_mat(r, k, rng);
        const auto b = random_mat(k, c, rng);
        check_close(dream::matmul(a, b), oracle::matmul(a, b), 1e-12);
    }
}

TEST_CASE("matmul rejects mismatched inner dimensions") {
    dream::Mat a(2, 3), b(4, 2);
    CHECK_THROWS_AS(dream::matmul(a, b), dream::DataError);
}

TEST_CASE("matmul_at_b equals transpose-then-multiply") {
    dream::SplitMix64 rng(19);
    const auto a = random_mat(6, 4, rng);
    const auto b = random_mat(6, 3, rng);
    check_close(dream::matmul_at_b(a, b), oracle::matmul(transpose(a), b), 1e-12);
    CHECK_THROWS_AS(dream::matmul_at_b(random_mat(5, 2, rng), random_mat(6, 2, rng)),
                    dream::DataError);
}

TEST_CASE("matmul_a_bt equals multiply-by-transpose") {
    dream::SplitMix64 rng(23);
    const auto a = random_mat(5, 4, rng);
    const auto b = random_mat(7, 4, rng);
    check_close(dream::matmul_a_bt(a, b), oracle::matmul(a, transpose(b)), 1e-12);
    CHECK_THROWS_AS(dream::matmul_a_bt(random_mat(5, 2, rng), random_mat(5, 3, rng)),
                    dream::DataError);
}

TEST_CASE("row-major layout: row pointers walk contiguous memory") {
    dream::Mat m(2, 3);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) = 10 * i + j;
    CHECK(m.row(1)[0] == 10.0);
    CHECK(m.row(1)[2] == 12.0);
    CHECK(m.a == std::vector<double>{0, 1, 2, 10, 11, 12});
}

TEST_CASE("dot and norm2 basics") {
    const double a[] = {3.0, 4.0};
    const double b[] = {1.0, -1.0};
    CHECK(dream::dot(a, b, 2) == -1.0);
    CHECK(dream::norm2(a, 2) == 5.0);
    CHECK(dream::norm2(b, 0) == 0.0);
}

TEST_CASE("all_finite flags NaN and infinity") {
    dream::Mat m(2, 2);
    CHECK(m.all_finite());
    m(1, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_FALSE(m.all_finite());
    m(1, 1) = std::numeric_limits<double>::infinity();
    CHECK_FALSE(m.all_finite());
}
