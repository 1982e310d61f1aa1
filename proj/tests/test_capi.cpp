// Copyright 2026 The gplfd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "gplfd/gplfd.h"

namespace {

TEST(CApi, VersionAndStatusNames) {
  EXPECT_STREQ(gplfd_version(), "0.1.0");
  EXPECT_STREQ(gplfd_status_name(GPLFD_OK), "ok");
  EXPECT_STRNE(gplfd_status_name(GPLFD_IO), gplfd_status_name(GPLFD_PARSE));
}

TEST(CApi, ErrorsCarryMessages) {
  gplfd_config* cfg = nullptr;
  EXPECT_EQ(gplfd_config_load("/nonexistent/cfg.json", &cfg), GPLFD_IO);
  EXPECT_EQ(cfg, nullptr);
  EXPECT_NE(std::string(gplfd_last_error()), "");
  ASSERT_EQ(gplfd_config_create(&cfg), GPLFD_OK);
  EXPECT_EQ(gplfd_config_set(cfg, "no.such.key", "1"), GPLFD_INVALID_INPUT);
  EXPECT_EQ(gplfd_config_set(cfg, "controller.mass", "-1"), GPLFD_INVALID_INPUT);
  EXPECT_EQ(gplfd_config_set(nullptr, "seed", "2"), GPLFD_INVALID_INPUT);
  gplfd_config_destroy(cfg);
  gplfd_config_destroy(nullptr);
}

TEST(CApi, ConfigHashTracksOverrides) {
  gplfd_config *a = nullptr, *b = nullptr;
  ASSERT_EQ(gplfd_config_create(&a), GPLFD_OK);
  ASSERT_EQ(gplfd_config_create(&b), GPLFD_OK);
  uint64_t ha = 0, hb = 0;
  gplfd_config_hash(a, &ha);
  gplfd_config_hash(b, &hb);
  EXPECT_EQ(ha, hb);
  ASSERT_EQ(gplfd_config_set(b, "seed", "7"), GPLFD_OK);
  gplfd_config_hash(b, &hb);
  EXPECT_NE(ha, hb);
  gplfd_config_destroy(a);
  gplfd_config_destroy(b);
}

TEST(CApi, StabilityWithDefaultController) {
  gplfd_config* cfg = nullptr;
  ASSERT_EQ(gplfd_config_create(&cfg), GPLFD_OK);
  gplfd_stability s{};
  ASSERT_EQ(gplfd_check_stability(cfg, 0.01, &s), GPLFD_OK);
  EXPECT_NEAR(s.sigma_rate_bound, 0.0133333333333, 1e-9);
  EXPECT_TRUE(s.satisfied);
  gplfd_config_destroy(cfg);
}

TEST(CApi, LearnQueryAdaptSimulate) {
  gplfd_config* cfg = nullptr;
  ASSERT_EQ(gplfd_config_create(&cfg), GPLFD_OK);
  ASSERT_EQ(gplfd_config_set(cfg, "simulation.horizon", "2"), GPLFD_OK);
  gplfd_demo_set *demos = nullptr, *truth = nullptr;
  ASSERT_EQ(gplfd_demo_set_generate(cfg, &demos, &truth), GPLFD_OK);
  size_t n = 0;
  gplfd_demo_set_count(demos, &n);
  EXPECT_EQ(n, 6u);

  gplfd_policy* policy = nullptr;
  ASSERT_EQ(gplfd_policy_learn(demos, cfg, &policy), GPLFD_OK) << gplfd_last_error();
  const std::vector<double> t{0.0, 0.5, 1.0};
  std::vector<double> mean(18), var(18);
  ASSERT_EQ(gplfd_policy_query(policy, t.data(), t.size(), mean.data(), var.data()), GPLFD_OK);
  for (double v : var) EXPECT_GT(v, 0.0);

  gplfd_via_point via{};
  via.t = 0.5;
  for (int d = 0; d < 6; ++d) {
    via.pose[d] = mean[6 + d];
    via.strength[d] = 1e-6;
  }
  via.pose[0] += 0.02;
  std::vector<double> am(18), av(18);
  ASSERT_EQ(gplfd_policy_adapt(policy, &via, 1, t.data(), t.size(), am.data(), av.data()), GPLFD_OK);
  EXPECT_NEAR(am[6], via.pose[0], 1e-2);
  EXPECT_EQ(gplfd_policy_adapt(policy, &via, 0, t.data(), t.size(), am.data(), av.data()),
            GPLFD_INVALID_INPUT);

  gplfd_sim_trace* trace = nullptr;
  ASSERT_EQ(gplfd_simulate_policy(policy, truth, 0, cfg, &trace), GPLFD_OK) << gplfd_last_error();
  size_t len = 0;
  gplfd_sim_trace_length(trace, &len);
  EXPECT_EQ(len, 2001u);
  std::vector<double> k(len);
  ASSERT_EQ(gplfd_sim_trace_column(trace, "stiffness", 0, k.data()), GPLFD_OK);
  for (double v : k) {
    EXPECT_GE(v, 100.0);
    EXPECT_LE(v, 500.0);
  }
  EXPECT_NE(gplfd_sim_trace_column(trace, "bogus", 0, k.data()), GPLFD_OK);

  const std::string path = ::testing::TempDir() + "capi_policy.json";
  ASSERT_EQ(gplfd_policy_save(policy, path.c_str()), GPLFD_OK);
  gplfd_policy* loaded = nullptr;
  ASSERT_EQ(gplfd_policy_load(path.c_str(), &loaded), GPLFD_OK);
  std::vector<double> lm(18), lv(18);
  gplfd_policy_query(loaded, t.data(), t.size(), lm.data(), lv.data());
  EXPECT_EQ(lm, mean);
  EXPECT_EQ(lv, var);
  std::remove(path.c_str());

  gplfd_sim_trace_destroy(trace);
  gplfd_policy_destroy(loaded);
  gplfd_policy_destroy(policy);
  gplfd_demo_set_destroy(truth);
  gplfd_demo_set_destroy(demos);
  gplfd_config_destroy(cfg);
}

}  // namespace
