#include "elastowave/config.hpp"
#include "elastowave/error.hpp"

#include <gtest/gtest.h>

#include <string>
#include <vector>

namespace ew = elastowave;

namespace {

const char* kVerification = R"(# two unit boxes meeting on x = 0
[domain]
name = matching
model = verification

[region.1]
kind = elastic
box = -1 0 0 0 1 1
h = 0.1
density = 2.7
cp = 6.20
cs = 3.12

[region.2]
kind = acoustic
box = 0 0 0 1 1 1
h = 0.1
density = 1
c = 1

[discretization]
degree = 2

[time]
final_time = 0.1

[boundary]
default = dirichlet
)";

std::size_t parse_error_line(const std::string& text) {
  try {
    ew::parse_config(text);
  } catch (const ew::ParseError& e) {
    return e.line();
  }
  ADD_FAILURE() << "expected ParseError";
  return 0;
}

}  // namespace

TEST(ParseConfig, VerificationLayout) {
  const auto c = ew::parse_config(kVerification);
  EXPECT_EQ(c.name, "matching");
  EXPECT_EQ(c.model, ew::ModelKind::Verification);
  ASSERT_EQ(c.regions.size(), 2u);
  const auto& e = *c.region(1);
  EXPECT_EQ(e.kind, ew::DomainKind::Elastic);
  EXPECT_NEAR(e.elastic.p_modulus(), 103.788, 1e-12);
  EXPECT_NEAR(e.elastic.mu, 26.28288, 1e-12);
  EXPECT_EQ(e.box->lower, ew::Vec3(-1, 0, 0));
  EXPECT_EQ(*e.h, 0.1);
  EXPECT_EQ(c.region(2)->acoustic, (ew::AcousticMaterial{1.0, 1.0}));
  EXPECT_EQ(c.final_time, 0.1);
  EXPECT_FALSE(c.dt.has_value());
  EXPECT_EQ(c.safety, 0.5);
  EXPECT_EQ(c.penalty, 1.0);
  EXPECT_EQ(c.boundary.default_condition, ew::BoundaryCondition::Dirichlet);
  EXPECT_EQ(c.region(3), nullptr);
}

TEST(ParseConfig, NegativeDensityRejected) {
  std::string text(kVerification);
  text.replace(text.find("density = 2.7"), 13, "density = -2.7");
  EXPECT_THROW(ew::parse_config(text), ew::InvalidArgument);
}

TEST(ParseConfig, CavityWithFixedStepAndQuarticDegree) {
  const auto full = ew::preset("cavity-demo", true);
  EXPECT_EQ(full.dt, 1e-5);
  EXPECT_EQ(full.degree, 4);
  EXPECT_NO_THROW(ew::validate(full));
  std::string text = ew::serialize_config(ew::preset("cavity-demo"));
  text.replace(text.find("dt = auto"), 9, "dt = 1e-5");
  text.replace(text.find("degree = 2"), 10, "degree = 4");
  const auto c = ew::parse_config(text);
  EXPECT_EQ(c.dt, 1e-5);
  EXPECT_EQ(c.degree, 4);
  EXPECT_EQ(c.boundary.default_condition, ew::BoundaryCondition::Absorbing);
  ASSERT_TRUE(c.source.has_value());
  EXPECT_EQ(c.source->amplitude, 1e10);
  EXPECT_EQ(c.source->peak_frequency, 22.0);
  EXPECT_EQ(c.region(1)->hole, (ew::Box{ew::Vec3(-30, -30, -30), ew::Vec3(30, 30, 30)}));
}

TEST(ParseConfig, RoundTripOfEveryPreset) {
  for (const auto& name : ew::preset_names()) {
    for (bool full : {false, true}) {
      const auto c = ew::preset(name, full);
      const auto text = ew::serialize_config(c);
      const auto back = ew::parse_config(text);
      EXPECT_EQ(back, c) << name;
      EXPECT_EQ(ew::serialize_config(back), text) << name;
    }
  }
  EXPECT_THROW(ew::preset("nope"), ew::InvalidArgument);
}

TEST(ParseConfig, ErrorsCarryLineNumbers) {
  std::string unknown_key(kVerification);
  unknown_key.replace(unknown_key.find("model = verification"), 20, "colour = verification");
  EXPECT_EQ(parse_error_line(unknown_key), 4u);

  EXPECT_EQ(parse_error_line(std::string(kVerification) + "[bogus]\n"), 29u);
  EXPECT_EQ(parse_error_line(std::string(kVerification) + "[time]\nfinal_time = 1\n"), 29u);
  EXPECT_EQ(parse_error_line(std::string(kVerification) + "xmin = dirichlet\nxmin = absorbing\n"), 30u);
  EXPECT_EQ(parse_error_line(std::string(kVerification) + "xmax = sticky\n"), 29u);
  EXPECT_EQ(parse_error_line(std::string(kVerification) + "this line has no equals sign\n"), 29u);

  std::string bad_number(kVerification);
  bad_number.replace(bad_number.find("h = 0.1"), 7, "h = 0.1x");
  EXPECT_EQ(parse_error_line(bad_number), 9u);

  std::string bad_box(kVerification);
  bad_box.replace(bad_box.find("box = -1 0 0 0 1 1"), 18, "box = -1 0 0 0 1");
  EXPECT_EQ(parse_error_line(bad_box), 8u);
}

TEST(ParseConfig, MissingMandatoryKeys) {
  std::string no_time(kVerification);
  no_time.erase(no_time.find("[time]"), std::string("[time]\nfinal_time = 0.1\n").size());
  EXPECT_THROW(ew::parse_config(no_time), ew::ParseError);

  std::string no_c(kVerification);
  no_c.erase(no_c.find("c = 1\n"), 6);
  EXPECT_THROW(ew::parse_config(no_c), ew::Error);

  EXPECT_THROW(ew::parse_config(std::string(kVerification) + "[source]\namplitude = 3\n"), ew::ParseError);
}

TEST(Validate, RejectsInconsistentConfigs) {
  auto c = ew::preset("verification-matching");
  EXPECT_NO_THROW(ew::validate(c));

  auto bad_t = c;
  bad_t.final_time = 0.0;
  EXPECT_THROW(ew::validate(bad_t), ew::InvalidArgument);

  auto bad_dt = c;
  bad_dt.dt = -1e-3;
  EXPECT_THROW(ew::validate(bad_dt), ew::InvalidArgument);

  auto bad_alpha = c;
  bad_alpha.penalty = 0.0;
  EXPECT_THROW(ew::validate(bad_alpha), ew::InvalidArgument);

  auto bad_speed = c;
  bad_speed.regions[1].acoustic.sound_speed = -1.0;
  EXPECT_THROW(ew::validate(bad_speed), ew::InvalidArgument);

  auto bad_degree = c;
  bad_degree.degree = 0;
  EXPECT_THROW(ew::validate(bad_degree), ew::InvalidArgument);
}

TEST(Presets, Parameters) {
  const auto names = ew::preset_names();
  EXPECT_EQ(names, (std::vector<std::string>{"verification-matching", "verification-nonmatching", "scholte",
                                             "cavity-demo"}));
  const auto nm = ew::preset("verification-nonmatching");
  EXPECT_EQ(*nm.region(1)->h, 0.1);
  EXPECT_EQ(*nm.region(2)->h, 0.2);

  const auto sch = ew::preset("scholte");
  EXPECT_EQ(sch.model, ew::ModelKind::Scholte);
  EXPECT_EQ(sch.region(1)->elastic, (ew::ElasticMaterial{1.0, 1.0, 1.0}));
  EXPECT_EQ(sch.region(2)->acoustic, (ew::AcousticMaterial{1.0, 1.0}));
  EXPECT_EQ(sch.final_time, 0.1);

  const auto cav = ew::preset("cavity-demo");
  const auto w = ew::wave_speeds(cav.region(1)->elastic);
  EXPECT_NEAR(w.p, 3000.0, 1e-9);
  EXPECT_NEAR(w.s, 1734.0, 1e-9);
  EXPECT_EQ(cav.region(2)->acoustic, (ew::AcousticMaterial{1024.0, 300.0}));
  EXPECT_EQ(ew::Vec3(cav.region(1)->box->upper - cav.region(1)->box->lower), ew::Vec3(300, 300, 150));

  const auto full = ew::preset("cavity-demo", true);
  EXPECT_EQ(ew::Vec3(full.region(1)->box->upper - full.region(1)->box->lower), ew::Vec3(1200, 1200, 600));
  EXPECT_EQ(full.final_time, 1.0);
}
