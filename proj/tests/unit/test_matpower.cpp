#include <gtest/gtest.h>

#include <algorithm>

#include "blackout/dc_flow.hpp"
#include "blackout/error.hpp"
#include "blackout/matpower.hpp"
#include "fixtures.hpp"

using namespace blackout;

namespace {

// Three buses; branch 2 is a transformer (tap 0.98), branch 4 is out of
// service, bus 3 has a negative Pd.
const char* kCase = R"(function mpc = tiny
mpc.version = '2';
mpc.baseMVA = 100;
% bus_i type Pd Qd Gs Bs area Vm Va baseKV zone Vmax Vmin
mpc.bus = [
  1 3 0   0 0 0 1 1 0 135 1 1.06 0.94;
  2 1 90  10 0 0 1 1 0 135 1 1.06 0.94;
  3 1 -10 0 0 0 1 1 0 135 1 1.06 0.94;
];
mpc.gen = [
  1 60 0 100 -100 1 100 1 200 0;
  2 0  0 0   0    1 100 0 50  0;
];
mpc.branch = [
  1 2 0.01 0.10 0 120 0 0 0    0 1 -360 360;
  1 3 0.01 0.20 0 0   0 0 0.98 0 1 -360 360;
  2 3 0.01 0.25 0 80  0 0 0    0 1 -360 360;
  1 2 0.01 0.30 0 50  0 0 0    0 0 -360 360;
];
mpc.bus_name = {
  'North';
  'South';
  'East';
};
)";

}  // namespace

TEST(Matpower, ParsesTinyCase) {
  const auto net = parse_matpower(kCase);
  ASSERT_EQ(net.buses.size(), 3u);
  EXPECT_EQ(net.buses[1].name, "South");
  ASSERT_EQ(net.branches.size(), 3u);  // out-of-service row dropped
  EXPECT_EQ(net.branches[2].id, 3);
  EXPECT_EQ(net.branches[1].kind, BranchKind::transformer);
  EXPECT_EQ(net.branches[0].kind, BranchKind::line);
  EXPECT_DOUBLE_EQ(net.branches[0].reactance, 0.10);
  EXPECT_DOUBLE_EQ(net.branches[0].flow_limit, 120.0);
  // Offline generator dropped, negative Pd turned into a generator.
  ASSERT_EQ(net.generators.size(), 2u);
  const auto neg = std::find_if(net.generators.begin(), net.generators.end(), [](const Generator& g) { return g.bus == 3; });
  ASSERT_NE(neg, net.generators.end());
  EXPECT_DOUBLE_EQ(neg->p_min, 0.0);
  EXPECT_DOUBLE_EQ(neg->p_max, 10.0);
  EXPECT_NEAR(net.total_dispatch(), net.total_demand(), 1e-9);
  EXPECT_DOUBLE_EQ(net.total_demand(), 90.0);
}

TEST(Matpower, MaintainableSelection) {
  EXPECT_EQ(parse_matpower(kCase).maintainable_ids(), (std::vector<int>{2}));
  EXPECT_EQ(parse_matpower(kCase, {MaintainableSelection::lines}).maintainable_ids(), (std::vector<int>{1, 3}));
  EXPECT_EQ(parse_matpower(kCase, {MaintainableSelection::all}).maintainable_ids().size(), 3u);
  EXPECT_TRUE(parse_matpower(kCase, {MaintainableSelection::none}).maintainable_ids().empty());
}

TEST(Matpower, UnratedBranchGetsFlowBasedLimit) {
  MatpowerImportOptions opt;
  opt.unlimited_rating_factor = 2.0;
  opt.min_flow_limit = 1.0;
  const auto net = parse_matpower(kCase, opt);
  const auto flows = dc_power_flow(net, all_in_service(net), [&] {
    std::vector<double> d;
    for (const auto& g : net.generators) d.push_back(g.dispatch);
    return d;
  }(), std::vector<double>{net.loads[0].served});
  EXPECT_NEAR(net.branches[1].flow_limit, std::max(2.0 * std::abs(flows[1]), 1.0), 1e-9);
}

TEST(Matpower, MalformedNumberCarriesLocation) {
  std::string text = kCase;
  text.replace(text.find("0.25"), 4, "0.2x");
  try {
    parse_matpower(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.block(), "branch");
    EXPECT_EQ(e.row(), 3u);
    EXPECT_EQ(e.column(), 4u);
  }
}

TEST(Matpower, MissingBlockAndShortRow) {
  std::string no_gen = kCase;
  no_gen.replace(no_gen.find("mpc.gen"), 7, "mpc.xyz");
  EXPECT_THROW(parse_matpower(no_gen), ParseError);
  std::string short_row = kCase;
  short_row.replace(short_row.find("2 3 0.01 0.25 0 80  0 0 0    0 1 -360 360;"), 42, "2 3 0.01;");
  EXPECT_THROW(parse_matpower(short_row), ParseError);
}

TEST(Matpower, DanglingBusIsValidationError) {
  std::string text = kCase;
  text.replace(text.find("2 3 0.01 0.25"), 3, "2 9");
  EXPECT_THROW(parse_matpower(text), ValidationError);
}

TEST(Matpower, BundledCases) {
  const auto n57 = load_matpower(fixtures::data_path("case57.m"));
  EXPECT_EQ(n57.buses.size(), 57u);
  EXPECT_EQ(n57.branches.size(), 80u);
  EXPECT_EQ(n57.transformer_count(), 17u);
  EXPECT_EQ(n57.maintainable_ids().size(), 17u);
  EXPECT_NEAR(n57.total_dispatch(), n57.total_demand(), 1e-6);

  const auto n300 = load_matpower(fixtures::data_path("case300.m"), {MaintainableSelection::transformers});
  EXPECT_EQ(n300.buses.size(), 300u);
  EXPECT_EQ(n300.maintainable_ids().size(), 107u);
}

TEST(Matpower, MissingFile) { EXPECT_THROW(load_matpower("/nonexistent/case.m"), Error); }
