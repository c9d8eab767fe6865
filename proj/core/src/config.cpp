#include "elastowave/config.hpp"

#include "elastowave/error.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace elastowave {

const RegionConfig* ScenarioConfig::region(int id) const {
  for (const auto& r : regions) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

RegionConfig* ScenarioConfig::region(int id) {
  for (auto& r : regions) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::None: return "none";
    case ModelKind::Verification: return "verification";
    case ModelKind::Scholte: return "scholte";
  }
  return "none";
}

namespace {

constexpr std::array<const char*, 6> kSideNames = {"xmin", "xmax", "ymin", "ymax", "zmin", "zmax"};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string value;
  std::size_t line = 0;
};

struct Section {
  std::string name;
  std::size_t line = 0;
  std::vector<std::pair<std::string, Entry>> entries;  // file order
};

/// Key lookup over one section; `finish` rejects keys nobody asked for.
class Reader {
 public:
  explicit Reader(const Section& s) : s_(s) {}

  const Entry* find(const std::string& key) {
    for (const auto& [k, e] : s_.entries) {
      if (k == key) {
        used_.push_back(k);
        return &e;
      }
    }
    return nullptr;
  }

  const Entry& require(const std::string& key) {
    const Entry* e = find(key);
    if (!e) throw ParseError("[" + s_.name + "] missing key '" + key + "'", s_.line);
    return *e;
  }

  void finish() const {
    for (const auto& [k, e] : s_.entries) {
      if (std::find(used_.begin(), used_.end(), k) == used_.end()) {
        throw ParseError("[" + s_.name + "] unknown key '" + k + "'", e.line);
      }
    }
  }

 private:
  const Section& s_;
  std::vector<std::string> used_;
};

double to_double(const Entry& e) {
  const std::string_view v = trim(e.value);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ParseError("expected a number, got '" + e.value + "'", e.line);
  return out;
}

int to_int(const Entry& e) {
  const std::string_view v = trim(e.value);
  int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ParseError("expected an integer, got '" + e.value + "'", e.line);
  return out;
}

std::vector<double> to_doubles(const Entry& e, std::size_t count) {
  std::string text = e.value;
  std::replace(text.begin(), text.end(), ',', ' ');
  std::istringstream in(text);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) out.push_back(to_double({tok, e.line}));
  if (out.size() != count) {
    throw ParseError("expected " + std::to_string(count) + " numbers, got '" + e.value + "'", e.line);
  }
  return out;
}

Vec3 to_vec3(const Entry& e) {
  const auto v = to_doubles(e, 3);
  return {v[0], v[1], v[2]};
}

Box to_box(const Entry& e) {
  const auto v = to_doubles(e, 6);
  return {Vec3(v[0], v[1], v[2]), Vec3(v[3], v[4], v[5])};
}

const char* condition_name(BoundaryCondition bc) {
  switch (bc) {
    case BoundaryCondition::Dirichlet: return "dirichlet";
    case BoundaryCondition::Neumann: return "neumann";
    case BoundaryCondition::Absorbing: return "absorbing";
  }
  return "dirichlet";
}

BoundaryCondition to_condition(const Entry& e) {
  const std::string v(trim(e.value));
  if (v == "dirichlet") return BoundaryCondition::Dirichlet;
  if (v == "neumann") return BoundaryCondition::Neumann;
  if (v == "absorbing") return BoundaryCondition::Absorbing;
  throw ParseError("expected dirichlet, neumann or absorbing, got '" + e.value + "'", e.line);
}

std::vector<Section> split_sections(std::string_view text) {
  std::vector<Section> sections;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string_view::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError("malformed section header", line_no);
      const std::string name(trim(line.substr(1, line.size() - 2)));
      for (const auto& s : sections) {
        if (s.name == name) throw ParseError("duplicate section [" + name + "]", line_no);
      }
      sections.push_back({name, line_no, {}});
    } else {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line_no);
      if (sections.empty()) throw ParseError("key outside of any section", line_no);
      const std::string key(trim(line.substr(0, eq)));
      const std::string value(trim(line.substr(eq + 1)));
      if (key.empty()) throw ParseError("empty key", line_no);
      auto& entries = sections.back().entries;
      for (const auto& [k, e] : entries) {
        if (k == key) throw ParseError("duplicate key '" + key + "'", line_no);
      }
      entries.push_back({key, {value, line_no}});
    }
    if (end == text.size()) break;
  }
  return sections;
}

void read_region(const Section& s, int id, RegionConfig& r) {
  Reader rd(s);
  r.id = id;
  const Entry& kind = rd.require("kind");
  const std::string k(trim(kind.value));
  if (k == "elastic") {
    r.kind = DomainKind::Elastic;
  } else if (k == "acoustic") {
    r.kind = DomainKind::Acoustic;
  } else {
    throw ParseError("region kind must be elastic or acoustic, got '" + kind.value + "'", kind.line);
  }
  if (const Entry* e = rd.find("box")) r.box = to_box(*e);
  if (const Entry* e = rd.find("hole")) r.hole = to_box(*e);
  if (const Entry* e = rd.find("h")) r.h = to_double(*e);
  if (const Entry* e = rd.find("cells")) {
    const auto v = to_doubles(*e, 3);
    std::array<int, 3> c{};
    for (int d = 0; d < 3; ++d) {
      const auto i = static_cast<std::size_t>(d);
      c[i] = static_cast<int>(v[i]);
      if (static_cast<double>(c[i]) != v[i]) throw ParseError("cells must be integers", e->line);
    }
    r.cells = c;
  }
  if (const Entry* e = rd.find("degree")) r.degree = to_int(*e);
  const double rho = to_double(rd.require("density"));
  if (r.kind == DomainKind::Elastic) {
    const Entry* cp = rd.find("cp");
    const Entry* cs = rd.find("cs");
    const Entry* lambda = rd.find("lambda");
    const Entry* mu = rd.find("mu");
    if (cp && cs && !lambda && !mu) {
      r.elastic = ElasticMaterial::from_velocities(rho, to_double(*cp), to_double(*cs));
    } else if (lambda && mu && !cp && !cs) {
      r.elastic = {rho, to_double(*lambda), to_double(*mu)};
    } else {
      throw ParseError("elastic region needs either cp and cs or lambda and mu", s.line);
    }
  } else {
    r.acoustic = {rho, to_double(rd.require("c"))};
  }
  rd.finish();
}

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string fmt(const Vec3& v) { return fmt(v[0]) + " " + fmt(v[1]) + " " + fmt(v[2]); }
std::string fmt(const Box& b) { return fmt(b.lower) + " " + fmt(b.upper); }

bool valid_name(const std::string& name) {
  if (name.empty()) return false;
  return std::all_of(name.begin(), name.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.'; });
}

}  // namespace

ScenarioConfig parse_config(std::string_view text) {
  ScenarioConfig cfg;
  bool have_time = false;
  for (const auto& s : split_sections(text)) {
    Reader rd(s);
    if (s.name == "domain") {
      if (const Entry* e = rd.find("name")) cfg.name = e->value;
      if (const Entry* e = rd.find("mesh")) cfg.mesh_file = e->value;
      if (const Entry* e = rd.find("model")) {
        const std::string m(trim(e->value));
        if (m == "none") {
          cfg.model = ModelKind::None;
        } else if (m == "verification") {
          cfg.model = ModelKind::Verification;
        } else if (m == "scholte") {
          cfg.model = ModelKind::Scholte;
        } else {
          throw ParseError("model must be none, verification or scholte, got '" + e->value + "'", e->line);
        }
      }
      if (const Entry* e = rd.find("omega")) cfg.omega = to_double(*e);
    } else if (s.name.rfind("region.", 0) == 0) {
      const Entry id_entry{s.name.substr(7), s.line};
      RegionConfig r;
      read_region(s, to_int(id_entry), r);
      cfg.regions.push_back(r);
      continue;
    } else if (s.name == "discretization") {
      if (const Entry* e = rd.find("degree")) cfg.degree = to_int(*e);
      if (const Entry* e = rd.find("penalty")) cfg.penalty = to_double(*e);
      if (const Entry* e = rd.find("mortar_order")) cfg.mortar_order = to_int(*e);
    } else if (s.name == "time") {
      have_time = true;
      cfg.final_time = to_double(rd.require("final_time"));
      if (const Entry* e = rd.find("dt")) {
        if (trim(e->value) == "auto") {
          cfg.dt.reset();
        } else {
          cfg.dt = to_double(*e);
        }
      }
      if (const Entry* e = rd.find("safety")) cfg.safety = to_double(*e);
    } else if (s.name == "boundary") {
      if (const Entry* e = rd.find("default")) cfg.boundary.default_condition = to_condition(*e);
      for (std::size_t i = 0; i < kSideNames.size(); ++i) {
        if (const Entry* e = rd.find(kSideNames[i])) cfg.boundary.sides[i] = to_condition(*e);
      }
    } else if (s.name == "source") {
      RickerSource src;
      src.position = to_vec3(rd.require("position"));
      src.peak_frequency = to_double(rd.require("peak_frequency"));
      if (const Entry* e = rd.find("amplitude")) src.amplitude = to_double(*e);
      if (const Entry* e = rd.find("delay")) src.delay = to_double(*e);
      if (const Entry* e = rd.find("direction")) src.direction = to_vec3(*e);
      cfg.source = src;
    } else if (s.name == "receivers") {
      for (const auto& [k, e] : s.entries) {
        if (!valid_name(k)) throw ParseError("receiver names may use letters, digits, '_', '-' and '.'", e.line);
        cfg.receivers.emplace_back(k, to_vec3(e));
        rd.find(k);
      }
    } else if (s.name == "output") {
      if (const Entry* e = rd.find("dir")) cfg.output_dir = e->value;
      if (const Entry* e = rd.find("snapshot_every")) cfg.snapshot_every = to_int(*e);
      if (const Entry* e = rd.find("receiver_every")) cfg.receiver_every = to_int(*e);
    } else {
      throw ParseError("unknown section [" + s.name + "]", s.line);
    }
    rd.finish();
  }
  if (!have_time) throw ParseError("missing section [time]", 0);
  if (cfg.regions.empty()) throw ParseError("no [region.<id>] sections", 0);
  std::sort(cfg.regions.begin(), cfg.regions.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  validate(cfg);
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ScenarioConfig& c) {
  std::ostringstream out;
  out << "[domain]\nname = " << c.name << "\n";
  if (c.mesh_file) out << "mesh = " << *c.mesh_file << "\n";
  out << "model = " << to_string(c.model) << "\nomega = " << fmt(c.omega) << "\n";
  for (const auto& r : c.regions) {
    out << "\n[region." << r.id << "]\nkind = " << (r.kind == DomainKind::Elastic ? "elastic" : "acoustic") << "\n";
    if (r.box) out << "box = " << fmt(*r.box) << "\n";
    if (r.hole) out << "hole = " << fmt(*r.hole) << "\n";
    if (r.h) out << "h = " << fmt(*r.h) << "\n";
    if (r.cells) out << "cells = " << (*r.cells)[0] << " " << (*r.cells)[1] << " " << (*r.cells)[2] << "\n";
    if (r.degree) out << "degree = " << *r.degree << "\n";
    if (r.kind == DomainKind::Elastic) {
      out << "density = " << fmt(r.elastic.density) << "\nlambda = " << fmt(r.elastic.lambda)
          << "\nmu = " << fmt(r.elastic.mu) << "\n";
    } else {
      out << "density = " << fmt(r.acoustic.density) << "\nc = " << fmt(r.acoustic.sound_speed) << "\n";
    }
  }
  out << "\n[discretization]\ndegree = " << c.degree << "\npenalty = " << fmt(c.penalty)
      << "\nmortar_order = " << c.mortar_order << "\n";
  out << "\n[time]\nfinal_time = " << fmt(c.final_time) << "\ndt = " << (c.dt ? fmt(*c.dt) : std::string("auto"))
      << "\nsafety = " << fmt(c.safety) << "\n";
  out << "\n[boundary]\n";
  if (c.boundary.default_condition) out << "default = " << condition_name(*c.boundary.default_condition) << "\n";
  for (std::size_t i = 0; i < kSideNames.size(); ++i) {
    if (c.boundary.sides[i]) out << kSideNames[i] << " = " << condition_name(*c.boundary.sides[i]) << "\n";
  }
  if (c.source) {
    const auto& s = *c.source;
    out << "\n[source]\nposition = " << fmt(s.position) << "\ndirection = " << fmt(s.direction)
        << "\namplitude = " << fmt(s.amplitude) << "\npeak_frequency = " << fmt(s.peak_frequency)
        << "\ndelay = " << fmt(s.delay) << "\n";
  }
  if (!c.receivers.empty()) {
    out << "\n[receivers]\n";
    for (const auto& [name, x] : c.receivers) out << name << " = " << fmt(x) << "\n";
  }
  out << "\n[output]\ndir = " << c.output_dir << "\nsnapshot_every = " << c.snapshot_every
      << "\nreceiver_every = " << c.receiver_every << "\n";
  return out.str();
}

void validate(const ScenarioConfig& c) {
  auto fail = [](const std::string& what) { throw InvalidArgument("config: " + what); };
  if (c.regions.empty()) fail("at least one region is required");
  if (!(c.final_time > 0.0)) fail("final_time must be positive");
  if (c.dt && !(*c.dt > 0.0)) fail("dt must be positive");
  if (!(c.safety > 0.0 && c.safety <= 1.0)) fail("safety must lie in (0, 1]");
  if (c.degree < 1 || c.degree > 10) fail("degree must lie in [1, 10]");
  if (!(c.penalty > 0.0)) fail("penalty must be positive");
  if (c.mortar_order < 0) fail("mortar_order must be >= 0");
  if (c.snapshot_every < 0) fail("snapshot_every must be >= 0");
  if (c.receiver_every < 1) fail("receiver_every must be >= 1");
  if (!(c.omega > 0.0)) fail("omega must be positive");

  bool elastic = false;
  bool acoustic = false;
  for (std::size_t i = 0; i < c.regions.size(); ++i) {
    const auto& r = c.regions[i];
    const std::string tag = "region " + std::to_string(r.id) + ": ";
    for (std::size_t j = 0; j < i; ++j) {
      if (c.regions[j].id == r.id) fail(tag + "duplicate id");
    }
    if (r.kind == DomainKind::Elastic) {
      elastic = true;
      try {
        elastowave::validate(r.elastic);
      } catch (const InvalidArgument& e) {
        fail(tag + e.what());
      }
    } else {
      acoustic = true;
      try {
        elastowave::validate(r.acoustic);
      } catch (const InvalidArgument& e) {
        fail(tag + e.what());
      }
    }
    if (r.degree && (*r.degree < 1 || *r.degree > 10)) fail(tag + "degree must lie in [1, 10]");
    if (!c.mesh_file) {
      if (!r.box) fail(tag + "box is required without a mesh file");
      if (r.h.has_value() == r.cells.has_value()) fail(tag + "give exactly one of h and cells");
      for (int d = 0; d < 3; ++d) {
        if (!(r.box->upper[d] > r.box->lower[d])) fail(tag + "box extents must be positive");
      }
      if (r.h && !(*r.h > 0.0)) fail(tag + "h must be positive");
      if (r.cells) {
        for (int n : *r.cells) {
          if (n < 1) fail(tag + "cells must be positive");
        }
      }
    }
  }
  if (c.model != ModelKind::None && !(elastic && acoustic)) fail("analytic models need elastic and acoustic regions");
  if (c.source && !(c.source->peak_frequency > 0.0)) fail("source peak_frequency must be positive");
  if (c.source && !(c.source->direction.norm() > 0.0)) fail("source direction must be nonzero");
  for (std::size_t i = 0; i < c.receivers.size(); ++i) {
    if (!valid_name(c.receivers[i].first)) fail("invalid receiver name '" + c.receivers[i].first + "'");
    for (std::size_t j = 0; j < i; ++j) {
      if (c.receivers[j].first == c.receivers[i].first) fail("duplicate receiver '" + c.receivers[i].first + "'");
    }
  }
}

std::vector<std::string> preset_names() {
  return {"verification-matching", "verification-nonmatching", "scholte", "cavity-demo"};
}

namespace {

RegionConfig elastic_box(int id, const Box& box, double h, const ElasticMaterial& m) {
  RegionConfig r;
  r.id = id;
  r.kind = DomainKind::Elastic;
  r.box = box;
  r.h = h;
  r.elastic = m;
  return r;
}

RegionConfig acoustic_box(int id, const Box& box, double h, const AcousticMaterial& m) {
  RegionConfig r;
  r.id = id;
  r.kind = DomainKind::Acoustic;
  r.box = box;
  r.h = h;
  r.acoustic = m;
  return r;
}

ScenarioConfig verification(double h_e, double h_a, const std::string& name) {
  ScenarioConfig c;
  c.name = name;
  c.model = ModelKind::Verification;
  const auto solid = ElasticMaterial::from_velocities(2.7, 6.20, 3.12);
  const AcousticMaterial fluid{1.0, 1.0};
  c.regions.push_back(elastic_box(1, {Vec3(-1, 0, 0), Vec3(0, 1, 1)}, h_e, solid));
  c.regions.push_back(acoustic_box(2, {Vec3(0, 0, 0), Vec3(1, 1, 1)}, h_a, fluid));
  c.final_time = 0.1;
  c.boundary.default_condition = BoundaryCondition::Dirichlet;
  c.receivers = {{"solid", Vec3(-0.5, 0.5, 0.5)}, {"fluid", Vec3(0.5, 0.5, 0.5)}};
  c.output_dir = name;
  return c;
}

ScenarioConfig scholte() {
  ScenarioConfig c;
  c.name = "scholte";
  c.model = ModelKind::Scholte;
  c.dt = 1e-4;
  RegionConfig solid;
  solid.id = 1;
  solid.kind = DomainKind::Elastic;
  solid.box = Box{Vec3(-1, -1, -10), Vec3(1, 1, 0)};
  solid.cells = std::array<int, 3>{3, 3, 15};
  solid.elastic = {1.0, 1.0, 1.0};
  RegionConfig fluid;
  fluid.id = 2;
  fluid.kind = DomainKind::Acoustic;
  fluid.box = Box{Vec3(-1, -1, 0), Vec3(1, 1, 10)};
  fluid.cells = std::array<int, 3>{3, 3, 15};
  fluid.acoustic = {1.0, 1.0};
  c.regions = {solid, fluid};
  c.final_time = 0.1;
  c.boundary.default_condition = BoundaryCondition::Dirichlet;
  c.receivers = {{"solid", Vec3(0, 0, -0.5)}, {"fluid", Vec3(0, 0, 0.5)}};
  c.output_dir = "scholte";
  return c;
}

ScenarioConfig cavity(bool full) {
  ScenarioConfig c;
  c.name = full ? "cavity-full" : "cavity-demo";
  const auto solid = ElasticMaterial::from_velocities(2700.0, 3000.0, 1734.0);
  const AcousticMaterial fluid{1024.0, 300.0};
  const double lx = full ? 600.0 : 150.0;
  const double lz = full ? 300.0 : 75.0;
  const Box cavity_box{Vec3(-30, -30, -30), Vec3(30, 30, 30)};
  auto outer = elastic_box(1, {Vec3(-lx, -lx, -lz), Vec3(lx, lx, lz)}, 15.0, solid);
  outer.hole = cavity_box;
  c.regions = {outer, acoustic_box(2, cavity_box, 5.0, fluid)};
  c.degree = full ? 4 : 2;
  c.final_time = full ? 1.0 : 0.7;
  if (full) c.dt = 1e-5;
  c.boundary.default_condition = BoundaryCondition::Absorbing;
  RickerSource src;
  src.amplitude = 1e10;
  src.peak_frequency = 22.0;
  src.delay = 0.25;
  src.position = full ? Vec3(200, 0, 300) : Vec3(50, 0, 75);
  c.source = src;
  const double near = full ? 240.0 : 60.0;
  const double mid = full ? 180.0 : 45.0;
  c.receivers = {{"A", Vec3(near, 0, near)},    {"B", Vec3(mid, 0, mid)},     {"C", Vec3(-mid, 0, mid)},
                 {"D", Vec3(-near, 0, near)},   {"E", Vec3(mid, 0, -mid)},    {"F", Vec3(near, 0, -near)},
                 {"G", Vec3(-mid, 0, -mid)},    {"H", Vec3(-near, 0, -near)}, {"a1", Vec3(20, 0, 20)},
                 {"a2", Vec3(-20, 0, 20)},      {"a3", Vec3(20, 0, -20)},     {"a4", Vec3(-20, 0, -20)},
                 {"a0", Vec3(0, 0, 0)}};
  c.output_dir = c.name;
  c.receiver_every = full ? 10 : 1;
  c.snapshot_every = full ? 10000 : 200;
  return c;
}

}  // namespace

ScenarioConfig preset(std::string_view name, bool full) {
  ScenarioConfig c;
  if (name == "verification-matching") {
    c = verification(0.1, 0.1, "verification-matching");
  } else if (name == "verification-nonmatching") {
    c = verification(0.1, 0.2, "verification-nonmatching");
  } else if (name == "scholte") {
    c = scholte();
  } else if (name == "cavity-demo") {
    c = cavity(full);
  } else {
    throw InvalidArgument("unknown preset '" + std::string(name) + "'");
  }
  validate(c);
  return c;
}

}  // namespace elastowave
