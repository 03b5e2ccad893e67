#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "rspde/io.hpp"
#include "rspde/registry.hpp"

namespace rspde {
namespace {

GridField sample_field(int d, int n) {
    GridField f(GridSpec(d, n));
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = std::sin(0.1 + static_cast<double>(k)) / 3.0;
    return f;
}

TEST(Csv, RoundTripIsExact) {
    for (int d = 1; d <= 3; ++d) {
        const GridField f = sample_field(d, 5);
        const GridField g = grid_from_csv(grid_to_csv(f));
        EXPECT_EQ(g.spec(), f.spec());
        EXPECT_TRUE(std::equal(f.values().begin(), f.values().end(), g.values().begin()));
    }
}

TEST(Csv, HeaderAndOrdering) {
    const std::string csv = grid_to_csv(GridField(GridSpec(2, 3), {1, 2, 3, 4}));
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "k,i1,i2,value");
    EXPECT_NE(csv.find("\n2,2,1,2\n"), std::string::npos);
    EXPECT_NE(csv.find("\n3,1,2,3\n"), std::string::npos);
}

TEST(Csv, RejectsMalformed) {
    EXPECT_THROW(grid_from_csv(""), std::invalid_argument);
    EXPECT_THROW(grid_from_csv("k,i1,value\n1,1,0.5\n2,2\n"), std::invalid_argument);
    EXPECT_THROW(grid_from_csv("k,i1,i2,value\n1,1,1,0.5\n2,2,1,0.5\n"), std::invalid_argument);
}

TEST(Json, RoundTrip) {
    const GridField f = sample_field(2, 4);
    const GridField g = grid_from_json(nlohmann::json::parse(grid_to_json(f).dump()));
    EXPECT_TRUE(std::equal(f.values().begin(), f.values().end(), g.values().begin()));
}

TEST(Files, AtomicWriteAndRead) {
    const auto dir = std::filesystem::temp_directory_path() / "rspde_io_test";
    std::filesystem::create_directories(dir);
    const GridField f = sample_field(1, 7);
    write_file_atomic(dir / "f.csv", grid_to_csv(f));
    write_file_atomic(dir / "f.json", grid_to_json(f).dump());
    EXPECT_EQ(sup_distance(read_grid_file(dir / "f.csv"), f), 0.0);
    EXPECT_EQ(sup_distance(read_grid_file(dir / "f.json"), f), 0.0);
    EXPECT_FALSE(std::filesystem::exists(dir / "f.csv.tmp"));
    std::filesystem::remove_all(dir);
}

TEST(Registry, ParsesNamedSpecs) {
    const NamedSpec s = parse_named_spec("linear:a=-0.1,b=-1");
    EXPECT_EQ(s.name, "linear");
    EXPECT_DOUBLE_EQ(s.param("a", 0), -0.1);
    EXPECT_DOUBLE_EQ(s.param("b", 0), -1.0);
    EXPECT_DOUBLE_EQ(s.param("c", 7), 7.0);
    EXPECT_THROW(parse_named_spec("linear:a"), std::invalid_argument);
    EXPECT_THROW(parse_named_spec("linear:a=x"), std::invalid_argument);
}

TEST(Registry, BarriersVanishOnBoundary) {
    for (const std::string& name : barrier_names()) {
        for (int d = 1; d <= 3; ++d) {
            const ScalarFunction v = make_barrier(name, d);
            Point low{0.4, 0.3, 0.6};
            Point high{0.4, 0.3, 0.6};
            low[0] = 0.0;
            high[d - 1] = 1.0;
            EXPECT_NEAR(v(low), 0.0, 1e-15) << name;
            EXPECT_NEAR(v(high), 0.0, 1e-12) << name;
        }
    }
    EXPECT_THROW(make_barrier("nope", 1), std::invalid_argument);
}

TEST(Registry, CoefficientMetadata) {
    const CoefficientPair c = make_coefficients("linear:a=-0.1,b=-1", "sine:a=0.5", 1);
    EXPECT_DOUBLE_EQ(c.lipschitz, 0.6);
    EXPECT_DOUBLE_EQ(c.bound_at_origin, 1.0);
    EXPECT_FALSE(c.monotone_f);
    EXPECT_DOUBLE_EQ(c.f({0.5, 0, 0}, 2.0), -1.2);
    EXPECT_NEAR(c.sigma({0.5, 0, 0}, std::numbers::pi / 2), 0.5, 1e-15);
    EXPECT_THROW(make_coefficient("bogus", 1), std::invalid_argument);
}

}  // namespace
}  // namespace rspde
