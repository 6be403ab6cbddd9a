#include <gtest/gtest.h>

#include <filesystem>
#include <numeric>
#include <sstream>

#include "green_router/instance.hpp"

using namespace green_router;

namespace {

std::string data_path(const std::string& rel) { return std::string(GREEN_ROUTER_DATA_DIR) + "/" + rel; }

Instance roundtrip(const Instance& inst) {
    std::stringstream ss;
    write_instance(ss, inst);
    return read_canonical(ss);
}

const char* kSmall = R"(NAME tiny
PROBLEM prp
CUSTOMERS 2
FLEET 1
CAPACITY 3650
SPEED 5.5 25
DEPOT 0 0 0 32400
NODES
1 1000 0 100 300 0 32400
2 0 1000 200 300 0 32400
)";

}  // namespace

TEST(Canonical, ParsesMinimalFile) {
    std::istringstream in(kSmall);
    const Instance inst = read_canonical(in);
    EXPECT_EQ(inst.customer_count(), 2);
    EXPECT_EQ(inst.name, "tiny");
    EXPECT_DOUBLE_EQ(inst.dist(1, 2), std::hypot(1000.0, 1000.0));
    EXPECT_EQ(inst.params, preset("prp-uk-2012"));
    EXPECT_FALSE(inst.max_route_duration);
}

TEST(Canonical, GeneratedTenCustomerRoundTrip) {
    const Instance inst = generate_tight_instance(set_b_config(random_prp_instance(10, 3), 3));
    const Instance back = roundtrip(inst);
    EXPECT_EQ(back.customer_count(), 10);
    EXPECT_EQ(back.capacity, 3650);
    EXPECT_EQ(back, inst);
}

TEST(Canonical, ExplicitDistancesAndDurationRoundTrip) {
    Instance inst = random_prp_instance(6, 9);
    inst.explicit_distances = true;
    inst.distance(1, 2) = 1.0 / 3.0;
    inst.max_route_duration = 28000.25;
    std::stringstream ss;
    write_instance(ss, inst);
    EXPECT_NE(ss.str().find("MAX_DURATION"), std::string::npos);
    EXPECT_EQ(read_canonical(ss), inst);
}

TEST(Canonical, WindowInversionIsValidationError) {
    std::string text = kSmall;
    text.replace(text.find("1 1000 0 100 300 0 32400"), 24, "1 1000 0 100 300 500 400");
    std::istringstream in(text);
    EXPECT_THROW(read_canonical(in), ValidationError);
}

TEST(Canonical, BadNumberReportsLine) {
    std::string text = kSmall;
    text.replace(text.find("2 0 1000 200"), 12, "2 0 1x00 200");
    std::istringstream in(text);
    try {
        read_canonical(in);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 10u);
    }
}

TEST(Canonical, UnwritablePathThrows) {
    EXPECT_THROW(write_instance(random_prp_instance(2, 1), "/nonexistent-dir/x.txt"), std::runtime_error);
}

TEST(Classic, ChristofidesC1) {
    const Instance inst = parse_instance(data_path("instances/C1.txt"), InstanceFormat::cvrp_classic);
    EXPECT_EQ(inst.customer_count(), 50);
    EXPECT_EQ(inst.capacity, 160);
    EXPECT_EQ(inst.total_demand(), 777);
    EXPECT_FALSE(inst.max_route_duration);
    EXPECT_EQ(inst.fleet_size, 5);
    EXPECT_EQ(inst.name, "C1");
}

TEST(Classic, ChristofidesC12) {
    const Instance inst = parse_instance(data_path("instances/C12.txt"), InstanceFormat::cvrp_classic);
    EXPECT_EQ(inst.customer_count(), 100);
    EXPECT_EQ(inst.capacity, 200);
    EXPECT_EQ(inst.total_demand(), 1810);
    EXPECT_EQ(inst.fleet_size, 10);
}

TEST(Classic, DurationLimitAndServiceTime) {
    std::istringstream in("2 10 100 5\n0 0\n3 4 2\n6 8 3\n");
    const Instance inst = read_cvrp_classic(in, ProblemKind::emvrp);
    ASSERT_TRUE(inst.max_route_duration);
    EXPECT_EQ(*inst.max_route_duration, 100);
    EXPECT_EQ(inst.nodes[1].service_time, 5);
    EXPECT_EQ(inst.depot().tw_end, 100);
    EXPECT_EQ(inst.params.empty_weight, 1.5);
}

TEST(Classic, DemandAboveCapacityRejected) {
    std::istringstream in("1 10\n0 0\n3 4 11\n");
    EXPECT_THROW(read_cvrp_classic(in), ValidationError);
}

TEST(Validation, SpeedBoundsOrdering) {
    Instance inst = random_prp_instance(3, 2);
    inst.v_min = inst.v_max;
    EXPECT_THROW(validate(inst), ValidationError);
}

TEST(Generator, SetBWidthsAndFeasibility) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Instance inst = generate_tight_instance(set_b_config(random_prp_instance(25, seed), seed));
        EXPECT_EQ(inst.depot().tw_start, 0);
        EXPECT_EQ(inst.depot().tw_end, 32400);
        for (int i = 1; i <= inst.customer_count(); ++i) {
            const Node& c = inst.nodes[static_cast<std::size_t>(i)];
            const double w = c.tw_end - c.tw_start;
            EXPECT_GE(w, 2000);
            EXPECT_LE(w, 5000);
            EXPECT_LE(std::floor(inst.dist(0, i) / inst.v_max), c.tw_start);
            EXPECT_LE(c.tw_start + w + c.service_time + std::ceil(inst.dist(i, 0) / inst.v_max), 32400);
        }
    }
}

TEST(Generator, SetCWidths) {
    const Instance inst = generate_tight_instance(set_c_config(random_prp_instance(40, 5), 5));
    double widest = 0;
    for (const auto& c : inst.customers()) {
        EXPECT_GE(c.tw_end - c.tw_start, 2000);
        EXPECT_LE(c.tw_end - c.tw_start, 15000);
        widest = std::max(widest, c.tw_end - c.tw_start);
    }
    EXPECT_GT(widest, 5000);
}

TEST(Generator, CustomerAtDepotUsesWholeHorizon) {
    Instance base = random_prp_instance(1, 1);
    base.nodes[1].x = base.nodes[0].x;
    base.nodes[1].y = base.nodes[0].y;
    base.nodes[1].service_time = 0;
    base.distance = euclidean_distances(base.nodes);
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const Instance inst = generate_tight_instance({base, 32400, 2000, 2000, seed});
        EXPECT_GE(inst.nodes[1].tw_start, 0);
        EXPECT_LE(inst.nodes[1].tw_start, 32400 - 2000);
    }
}

TEST(Generator, Deterministic) {
    const auto a = generate_tight_instance(set_b_config(random_prp_instance(10, 7), 7));
    const auto b = generate_tight_instance(set_b_config(random_prp_instance(10, 7), 7));
    EXPECT_EQ(a, b);
    const auto c = generate_tight_instance(set_b_config(random_prp_instance(10, 7), 8));
    EXPECT_NE(a, c);
}

TEST(Generator, EmptyIntervalThrows) {
    Instance base = random_prp_instance(1, 1, 150000);
    base.nodes[1].x = base.nodes[0].x + 400000;
    base.distance = euclidean_distances(base.nodes);
    EXPECT_THROW(generate_tight_instance(set_b_config(base, 1)), InfeasibleError);
}
