#include <gtest/gtest.h>

#include "blackout/error.hpp"
#include "blackout/failure_model.hpp"
#include "fixtures.hpp"

using namespace blackout;

TEST(FailureParams, PiecewiseLinear) {
  const FailureParams p{0.01, 0.91, 1.0, 1.3};
  EXPECT_DOUBLE_EQ(p.probability(0.0), 0.01);
  EXPECT_DOUBLE_EQ(p.probability(1.0), 0.01);
  EXPECT_NEAR(p.probability(1.15), 0.46, 1e-15);
  EXPECT_DOUBLE_EQ(p.probability(1.3), 0.91);
  EXPECT_DOUBLE_EQ(p.probability(7.0), 0.91);
}

TEST(FailureParams, MonotoneInLoading) {
  const FailureParams p = kDefaultLineParams;
  double prev = 0;
  for (double l = 0; l < 2.0; l += 0.01) {
    EXPECT_GE(p.probability(l), prev);
    prev = p.probability(l);
  }
}

TEST(FailureParams, Check) {
  EXPECT_NO_THROW(check(kDefaultTransformerParams, "t"));
  EXPECT_THROW(check({0.5, 0.4, 1.0, 1.4}, "x"), ValidationError);
  EXPECT_THROW(check({0.0, 1.1, 1.0, 1.4}, "x"), ValidationError);
  EXPECT_THROW(check({0.0, 0.5, 1.4, 1.4}, "x"), ValidationError);
}

TEST(FailureModel, DefaultsByKindAndOverrides) {
  const auto net = fixtures::five_branch();
  const FailureParams special{0.2, 0.3, 0.5, 0.9};
  const auto m = FailureModel::for_network(net, kDefaultLineParams, kDefaultTransformerParams, {{4, special}});
  EXPECT_EQ(m.params(1), kDefaultLineParams);
  EXPECT_EQ(m.params(3), kDefaultTransformerParams);
  EXPECT_EQ(m.params(4), special);
  EXPECT_THROW(m.params(17), Error);
  EXPECT_THROW(FailureModel::for_network(net, kDefaultLineParams, kDefaultTransformerParams, {{17, special}}),
               ValidationError);
  EXPECT_THROW(failure_probability(m, 1, -0.5), ValidationError);
}

TEST(FailureModel, Maintenance) {
  const auto net = fixtures::five_branch();
  const auto m = FailureModel::for_network(net);
  const std::vector<int> ids{2, 5};
  const auto scaled = m.with_maintenance(MaintenanceEffect::scale(0.1), ids);
  EXPECT_DOUBLE_EQ(scaled.params(2).p_base, 0.1 * kDefaultLineParams.p_base);
  EXPECT_DOUBLE_EQ(scaled.params(5).p_peak, 0.1 * kDefaultTransformerParams.p_peak);
  EXPECT_EQ(scaled.params(1), m.params(1));
  const FailureParams r{0.0, 0.1, 1.2, 1.6};
  EXPECT_EQ(m.with_maintenance(MaintenanceEffect::replace(r), ids).params(5), r);
  EXPECT_NE(scaled.digest(), m.digest());
}

TEST(MaintenanceEffect, JsonRoundTrip) {
  for (const auto& e : {MaintenanceEffect::scale(0.25), MaintenanceEffect::replace({0.0, 0.2, 1.1, 1.5})})
    EXPECT_EQ(MaintenanceEffect::from_json(e.to_json()), e);
  EXPECT_THROW(MaintenanceEffect::from_json({{"mode", "scale"}, {"scale_factor", 1.5}}), ValidationError);
  EXPECT_THROW(MaintenanceEffect::from_json({{"mode", "paint"}}), SchemaError);
  EXPECT_THROW(MaintenanceEffect::from_json({{"mode", "replace"}}), SchemaError);
}

TEST(FailureModel, ParamsJson) {
  const FailureParams p{0.01, 0.5, 0.9, 1.2};
  EXPECT_EQ(params_from_json(params_to_json(p), "$"), p);
  auto doc = params_to_json(p);
  doc.erase("ell_sat");
  try {
    params_from_json(doc, "$.x");
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.path(), "$.x.ell_sat");
  }
}
