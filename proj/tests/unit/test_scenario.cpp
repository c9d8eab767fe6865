#include "elastowave/error.hpp"
#include "elastowave/scenario.hpp"

#include "fixtures.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace ew = elastowave;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("elastowave_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Coarse two-box scenario that runs in well under a second.
ew::ScenarioConfig tiny(ew::ModelKind model) {
  ew::ScenarioConfig c;
  c.name = "tiny";
  c.model = model;
  ew::RegionConfig solid;
  solid.id = 1;
  solid.kind = ew::DomainKind::Elastic;
  solid.box = ew::testing::box(-1, 0, 0, 0, 1, 1);
  solid.cells = std::array<int, 3>{2, 2, 2};
  solid.elastic = ew::ElasticMaterial::from_velocities(2.7, 6.20, 3.12);
  ew::RegionConfig fluid;
  fluid.id = 2;
  fluid.kind = ew::DomainKind::Acoustic;
  fluid.box = ew::testing::box(0, 0, 0, 1, 1, 1);
  fluid.cells = std::array<int, 3>{2, 2, 2};
  c.regions = {solid, fluid};
  c.final_time = 0.01;
  c.dt = 1e-3;
  c.boundary.default_condition = ew::BoundaryCondition::Dirichlet;
  c.receivers = {{"s", ew::Vec3(-0.4, 0.3, 0.6)}, {"f", ew::Vec3(0.3, 0.6, 0.4)}};
  return c;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST(Snapshot, OneElementLayout) {
  const auto d = ew::testing::discretize_mesh(
      ew::build_box_mesh(ew::testing::box(0, 0, 0, 1, 2, 3), {1, 1, 1}, 1, ew::DomainKind::Elastic),
      ew::testing::materials(), 2, ew::testing::all(ew::BoundaryCondition::Neumann));
  auto state = ew::SimState::zeros(d.elastic->size(), d.acoustic->size());
  state.u = ew::interpolate(*d.elastic, [](const ew::Vec3& x, std::span<double> v) {
    v[0] = x[0];
    v[1] = x[1];
    v[2] = x[2];
  });
  const auto dir = scratch("snapshot");
  fs::create_directories(dir);
  ew::write_snapshot(d, state, dir / "s.vtk");
  const auto l = lines(slurp(dir / "s.vtk"));
  auto at = [&](const std::string& head) {
    for (std::size_t i = 0; i < l.size(); ++i) {
      if (l[i].rfind(head, 0) == 0) return i;
    }
    ADD_FAILURE() << "missing " << head;
    return l.size();
  };
  EXPECT_EQ(l[at("POINTS")], "POINTS 8 double");
  EXPECT_EQ(l[at("CELLS")], "CELLS 1 9");
  EXPECT_EQ(l[at("CELLS") + 1], "8 0 1 2 3 4 5 6 7");
  EXPECT_EQ(l[at("CELL_TYPES")], "CELL_TYPES 1");
  EXPECT_EQ(l[at("CELL_TYPES") + 1], "12");
  // VTK order walks the bottom face counterclockwise, then the top.
  const std::vector<std::string> corners{"0 0 0", "1 0 0", "1 2 0", "0 2 0", "0 0 3", "1 0 3", "1 2 3", "0 2 3"};
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_EQ(l[at("POINTS") + 1 + i], corners[i]);
    EXPECT_EQ(l[at("VECTORS displacement") + 1 + i], corners[i]);
  }
  EXPECT_EQ(l[at("POINT_DATA")], "POINT_DATA 8");
  EXPECT_EQ(l[at("SCALARS phi") + 2], "0");
  fs::remove_all(dir);
}

TEST(RunScenario, SnapshotCadence) {
  auto c = tiny(ew::ModelKind::None);
  c.snapshot_every = 4;
  const auto dir = scratch("cadence");
  ew::RunOptions o;
  o.output_dir = dir.string();
  const auto r = ew::run_scenario(c, o);
  EXPECT_EQ(r.steps, 10u);
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(dir / "snapshots")) names.push_back(e.path().filename().string());
  std::sort(names.begin(), names.end());
  EXPECT_EQ(names, (std::vector<std::string>{"snapshot_000000.vtk", "snapshot_000004.vtk", "snapshot_000008.vtk"}));
  fs::remove_all(dir);
}

TEST(RunScenario, QuietWithoutSourceOrInitialData) {
  auto c = tiny(ew::ModelKind::None);
  ew::RunOptions o;
  o.write_outputs = false;
  const auto r = ew::run_scenario(c, o);
  ASSERT_EQ(r.receivers.size(), 2u);
  EXPECT_EQ(r.receivers.times().size(), 11u);
  for (std::size_t i = 0; i < r.receivers.size(); ++i) {
    for (double v : r.receivers.samples(i)) EXPECT_EQ(v, 0.0);
  }
  EXPECT_FALSE(r.error.has_value());
}

TEST(RunScenario, ReceiverTimesIncreaseAndLandOnFinalTime) {
  auto c = tiny(ew::ModelKind::Verification);
  c.dt = 0.003;
  c.receiver_every = 2;
  ew::RunOptions o;
  o.write_outputs = false;
  const auto r = ew::run_scenario(c, o);
  EXPECT_EQ(r.steps, 4u);
  EXPECT_DOUBLE_EQ(r.dt, 0.0025);
  const auto& t = r.receivers.times();
  ASSERT_EQ(t.size(), 3u);
  for (std::size_t i = 1; i < t.size(); ++i) EXPECT_GT(t[i], t[i - 1]);
  EXPECT_EQ(t.front(), 0.0);
  EXPECT_NEAR(t.back(), 0.01, 1e-15);
}

TEST(RunScenario, BitIdenticalOutputs) {
  auto c = tiny(ew::ModelKind::Verification);
  const auto a = scratch("det_a");
  const auto b = scratch("det_b");
  ew::RunOptions o;
  o.output_dir = a.string();
  ew::run_scenario(c, o);
  o.output_dir = b.string();
  ew::run_scenario(c, o);
  for (const char* f : {"receivers/s.csv", "receivers/f.csv", "errors.csv"}) {
    const auto x = slurp(a / f);
    EXPECT_FALSE(x.empty()) << f;
    EXPECT_EQ(x, slurp(b / f)) << f;
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(RunScenario, Metadata) {
  auto c = tiny(ew::ModelKind::Verification);
  const auto dir = scratch("meta");
  ew::RunOptions o;
  o.output_dir = dir.string();
  o.config_text = "";
  const auto r = ew::run_scenario(c, o);
  const auto meta = nlohmann::json::parse(slurp(dir / "metadata.json"));
  EXPECT_EQ(meta.at("config_sha1"), "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  EXPECT_EQ(meta.at("penalty_alpha"), 1.0);
  EXPECT_EQ(meta.at("zeta"), 0.0);
  EXPECT_EQ(meta.at("dt"), 1e-3);
  EXPECT_EQ(meta.at("dt_source"), "config");
  EXPECT_EQ(meta.at("steps"), 10);
  EXPECT_EQ(meta.at("elements"), 16);
  EXPECT_EQ(meta.at("interface_pairs"), 4);
  EXPECT_EQ(meta.at("model"), "verification");
  EXPECT_EQ(meta.at("energy_error"), r.error->energy());
  EXPECT_TRUE(meta.contains("threads"));
  fs::remove_all(dir);
}

TEST(RunScenario, EstimatedStepIsRecorded) {
  auto c = tiny(ew::ModelKind::None);
  c.dt.reset();
  ew::RunOptions o;
  o.write_outputs = false;
  const auto r = ew::run_scenario(c, o);
  EXPECT_GT(r.estimate.dt, 0.0);
  EXPECT_LE(r.dt, r.estimate.dt);
  EXPECT_GT(r.dt, 0.5 * r.estimate.dt);
}

TEST(GitBlobSha1, KnownDigests) {
  EXPECT_EQ(ew::git_blob_sha1(""), "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  EXPECT_EQ(ew::git_blob_sha1("hello world\n"), "3b18e512dba79e4c8300dd08aeb37f8e728b8dad");
}

TEST(ExitCodes, Mapping) {
  EXPECT_EQ(ew::exit_code_for(ew::ParseError("x", 3)), 2);
  EXPECT_EQ(ew::exit_code_for(ew::GeometryError("x")), 3);
  EXPECT_EQ(ew::exit_code_for(ew::ClassificationError("x")), 3);
  EXPECT_EQ(ew::exit_code_for(ew::DivergenceError("x", 7)), 4);
  EXPECT_EQ(ew::exit_code_for(ew::IoError("x")), 5);
  EXPECT_EQ(ew::exit_code_for(ew::InvalidArgument("x")), 1);
  EXPECT_EQ(ew::exit_code_for(std::runtime_error("x")), 1);
}

TEST(ConvergeSweep, NeedsThreeValuesAndAModel) {
  const auto c = tiny(ew::ModelKind::Verification);
  const std::vector<double> one{0.5};
  EXPECT_THROW(ew::converge_sweep(c, ew::SweepKind::MeshSize, one), ew::InvalidArgument);
  const std::vector<double> three{0.5, 0.25, 0.125};
  EXPECT_THROW(ew::converge_sweep(tiny(ew::ModelKind::None), ew::SweepKind::MeshSize, three), ew::InvalidArgument);
  const std::vector<double> fractional{1.0, 1.5, 2.0};
  EXPECT_THROW(ew::converge_sweep(c, ew::SweepKind::Degree, fractional), ew::InvalidArgument);
}

TEST(WithMeshsize, KeepsTheRatio) {
  const auto c = ew::preset("verification-nonmatching");
  const auto s = ew::with_meshsize(c, 0.05);
  EXPECT_DOUBLE_EQ(*s.region(1)->h, 0.05);
  EXPECT_DOUBLE_EQ(*s.region(2)->h, 0.1);
  const auto cells = ew::with_meshsize(tiny(ew::ModelKind::None), 0.25);
  EXPECT_EQ(*cells.region(2)->cells, (std::array<int, 3>{4, 4, 4}));
  EXPECT_EQ(ew::with_degree(c, 5).degree, 5);
}
