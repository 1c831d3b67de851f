#include "hrc/model.hpp"

#include <json.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <fstream>
#include <sstream>

namespace hrc {

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

std::string at(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

std::string idx(const std::string& parent, std::size_t i) {
  return parent + "[" + std::to_string(i) + "]";
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw ParseError(path + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(at(path, key) + ": missing required key");
  return *it;
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ParseError(path + ": expected a number");
  return j.get<double>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ParseError(path + ": expected a string");
  return j.get<std::string>();
}

std::vector<double> as_numbers(const json& j, const std::string& path, std::optional<std::size_t> n) {
  if (!j.is_array()) throw ParseError(path + ": expected an array");
  if (n && j.size() != *n) {
    throw ParseError(path + ": expected " + std::to_string(*n) + " elements, got " +
                     std::to_string(j.size()));
  }
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_number(j[i], idx(path, i)));
  return out;
}

Eigen::Vector3d as_vec3(const json& j, const std::string& path) {
  auto v = as_numbers(j, path, 3);
  return {v[0], v[1], v[2]};
}

Eigen::Matrix3d as_mat3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) throw ParseError(path + ": expected a 3x3 nested array");
  Eigen::Matrix3d m;
  for (int r = 0; r < 3; ++r) {
    auto row = as_numbers(j[r], idx(path, r), 3);
    for (int c = 0; c < 3; ++c) m(r, c) = row[c];
  }
  return m;
}

Eigen::Isometry3d as_transform(const json& j, const std::string& path) {
  Eigen::Vector3d t = as_vec3(require(j, "translation", path), at(path, "translation"));
  auto q = as_numbers(require(j, "rotation", path), at(path, "rotation"), 4);
  Eigen::Quaterniond quat(q[0], q[1], q[2], q[3]);
  if (std::abs(quat.norm() - 1.0) > 1e-9) {
    throw ValidationError(at(path, "rotation"), "quaternion not unit");
  }
  Eigen::Isometry3d iso = Eigen::Isometry3d::Identity();
  iso.linear() = quat.normalized().toRotationMatrix();
  iso.translation() = t;
  return iso;
}

json to_json(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

json to_json(const Eigen::Matrix3d& m) {
  json out = json::array();
  for (int r = 0; r < 3; ++r) out.push_back(json::array({m(r, 0), m(r, 1), m(r, 2)}));
  return out;
}

json to_json(const Eigen::Isometry3d& iso) {
  Eigen::Quaterniond q(iso.linear());
  q.normalize();
  return {{"translation", to_json(Eigen::Vector3d(iso.translation()))},
          {"rotation", json::array({q.w(), q.x(), q.y(), q.z()})}};
}

json parse_document(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("document root must be an object");
  const json& version = require(doc, "format_version", "");
  if (!version.is_number_integer() || version.get<int>() != kFormatVersion) {
    throw ValidationError("format_version", "unsupported format version (expected 1)");
  }
  return doc;
}

JointKind parse_kind(const std::string& s, const std::string& path) {
  if (s == "revolute") return JointKind::revolute;
  if (s == "prismatic") return JointKind::prismatic;
  if (s == "fixed") return JointKind::fixed;
  throw ValidationError(path, "unknown joint kind '" + s + "'");
}

SensingMode parse_mode(const std::string& s, const std::string& path) {
  if (s == "skin_pads") return SensingMode::skin_pads;
  if (s == "joint_torque") return SensingMode::joint_torque;
  throw ValidationError(path, "unknown sensing mode '" + s + "'");
}

}  // namespace

const char* to_string(JointKind kind) {
  switch (kind) {
    case JointKind::revolute: return "revolute";
    case JointKind::prismatic: return "prismatic";
    case JointKind::fixed: return "fixed";
  }
  return "?";
}

const char* to_string(SensingMode mode) {
  return mode == SensingMode::skin_pads ? "skin_pads" : "joint_torque";
}

const SkinPad& RobotModel::pad(int id) const {
  for (const auto& p : pads) {
    if (p.id == id) return p;
  }
  throw std::out_of_range("no pad with id " + std::to_string(id));
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError(path.string() + ": read failed");
  return ss.str();
}

void validate(const RobotModel& model) {
  if (model.joints.empty()) throw ValidationError("joints", "at least one joint required");
  if (model.joints.size() != model.links.size()) {
    throw ValidationError("links", "joint and link counts differ (" +
                                       std::to_string(model.joints.size()) + " vs " +
                                       std::to_string(model.links.size()) + ")");
  }
  for (std::size_t i = 0; i < model.joints.size(); ++i) {
    const auto& j = model.joints[i];
    const std::string p = idx("joints", i);
    if (std::abs(j.axis.norm() - 1.0) > 1e-9) throw ValidationError(p + ".axis", "axis not unit");
    if (!(j.position_min <= j.position_max)) {
      throw ValidationError(p + ".position_limits", "min exceeds max");
    }
    if (!(j.velocity_limit > 0.0)) throw ValidationError(p + ".velocity_limit", "must be positive");
  }
  for (std::size_t i = 0; i < model.links.size(); ++i) {
    const auto& l = model.links[i];
    const std::string p = idx("links", i);
    if (!(l.mass >= 0.0)) throw ValidationError(p + ".mass", "must be non-negative");
    if ((l.inertia - l.inertia.transpose()).cwiseAbs().maxCoeff() > 1e-9) {
      throw ValidationError(p + ".inertia", "not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(l.inertia);
    if (eig.eigenvalues().minCoeff() < -1e-12) {
      throw ValidationError(p + ".inertia", "not positive semidefinite");
    }
    for (std::size_t c = 0; c < l.collision_geometry.size(); ++c) {
      if (!(l.collision_geometry[c].radius > 0.0)) {
        throw ValidationError(p + idx(".collision_geometry", c) + ".radius", "must be positive");
      }
    }
  }
  for (std::size_t i = 0; i < model.pads.size(); ++i) {
    const auto& pad = model.pads[i];
    const std::string p = idx("pads", i);
    if (pad.link >= model.links.size()) throw ValidationError(p + ".link", "link index out of range");
    const auto& sp = pad.surface_patch;
    if (sp.capsule >= model.links[pad.link].collision_geometry.size()) {
      throw ValidationError(p + ".surface_patch.capsule", "capsule index out of range");
    }
    if (!(0.0 <= sp.t0 && sp.t0 < sp.t1 && sp.t1 <= 1.0)) {
      throw ValidationError(p + ".surface_patch", "require 0 <= t0 < t1 <= 1");
    }
    if (!(sp.phi_min < sp.phi_max)) throw ValidationError(p + ".surface_patch.sector", "empty sector");
    for (std::size_t k = 0; k < i; ++k) {
      if (model.pads[k].id == pad.id) throw ValidationError(p + ".id", "duplicate pad id");
    }
  }
}

RobotModel parse_robot(const std::string& json_text) {
  const json doc = parse_document(json_text);
  RobotModel m;
  if (auto it = doc.find("name"); it != doc.end()) m.name = as_string(*it, "name");
  m.sensing_mode = parse_mode(as_string(require(doc, "sensing_mode", ""), "sensing_mode"), "sensing_mode");
  if (auto it = doc.find("tool_point"); it != doc.end()) m.tool_point = as_vec3(*it, "tool_point");
  if (doc.contains("parent") || doc.contains("children")) {
    throw ValidationError("joints", "branching kinematic trees are not supported");
  }

  const json& joints = require(doc, "joints", "");
  if (!joints.is_array()) throw ParseError("joints: expected an array");
  for (std::size_t i = 0; i < joints.size(); ++i) {
    const std::string p = idx("joints", i);
    const json& j = joints[i];
    JointSpec js;
    js.name = as_string(require(j, "name", p), at(p, "name"));
    js.kind = parse_kind(as_string(require(j, "kind", p), at(p, "kind")), at(p, "kind"));
    js.axis = as_vec3(require(j, "axis", p), at(p, "axis"));
    js.origin = as_transform(require(j, "origin", p), at(p, "origin"));
    auto lim = as_numbers(require(j, "position_limits", p), at(p, "position_limits"), 2);
    js.position_min = lim[0];
    js.position_max = lim[1];
    js.velocity_limit = as_number(require(j, "velocity_limit", p), at(p, "velocity_limit"));
    if (j.contains("parent")) {
      const auto parent = j["parent"];
      const bool serial = (i == 0 && parent.is_null()) ||
                          (parent.is_number_integer() && parent.get<long>() == static_cast<long>(i) - 1);
      if (!serial) throw ValidationError(at(p, "parent"), "chain must be serial (parent = previous link)");
    }
    m.joints.push_back(std::move(js));
  }

  const json& links = require(doc, "links", "");
  if (!links.is_array()) throw ParseError("links: expected an array");
  for (std::size_t i = 0; i < links.size(); ++i) {
    const std::string p = idx("links", i);
    const json& l = links[i];
    LinkSpec ls;
    ls.name = as_string(require(l, "name", p), at(p, "name"));
    ls.mass = as_number(require(l, "mass", p), at(p, "mass"));
    ls.com = as_vec3(require(l, "com", p), at(p, "com"));
    ls.inertia = as_mat3(require(l, "inertia", p), at(p, "inertia"));
    if (auto it = l.find("collision_geometry"); it != l.end()) {
      if (!it->is_array()) throw ParseError(at(p, "collision_geometry") + ": expected an array");
      for (std::size_t c = 0; c < it->size(); ++c) {
        const std::string cp = idx(at(p, "collision_geometry"), c);
        const json& cj = (*it)[c];
        Capsule cap;
        cap.p0 = as_vec3(require(cj, "p0", cp), at(cp, "p0"));
        cap.p1 = as_vec3(require(cj, "p1", cp), at(cp, "p1"));
        cap.radius = as_number(require(cj, "radius", cp), at(cp, "radius"));
        ls.collision_geometry.push_back(cap);
      }
    }
    m.links.push_back(std::move(ls));
  }

  if (auto it = doc.find("pads"); it != doc.end()) {
    if (!it->is_array()) throw ParseError("pads: expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string p = idx("pads", i);
      const json& pj = (*it)[i];
      SkinPad pad;
      const json& id = require(pj, "id", p);
      if (!id.is_number_integer()) throw ParseError(at(p, "id") + ": expected an integer");
      pad.id = id.get<int>();
      const json& link = require(pj, "link", p);
      if (!link.is_number_integer()) throw ParseError(at(p, "link") + ": expected an integer");
      if (link.get<long>() < 0) throw ValidationError(at(p, "link"), "link index out of range");
      pad.link = link.get<std::size_t>();
      const std::string sp = at(p, "surface_patch");
      const json& sj = require(pj, "surface_patch", p);
      if (auto c = sj.find("capsule"); c != sj.end()) {
        if (!c->is_number_unsigned()) throw ParseError(at(sp, "capsule") + ": expected an index");
        pad.surface_patch.capsule = c->get<std::size_t>();
      }
      pad.surface_patch.t0 = as_number(require(sj, "t0", sp), at(sp, "t0"));
      pad.surface_patch.t1 = as_number(require(sj, "t1", sp), at(sp, "t1"));
      if (auto s = sj.find("sector"); s != sj.end()) {
        auto sec = as_numbers(*s, at(sp, "sector"), 2);
        pad.surface_patch.phi_min = sec[0];
        pad.surface_patch.phi_max = sec[1];
      }
      m.pads.push_back(pad);
    }
  }
  validate(m);
  return m;
}

RobotModel load_robot(const std::filesystem::path& path) { return parse_robot(read_text_file(path)); }

std::string serialize_robot(const RobotModel& model) {
  json doc;
  doc["format_version"] = kFormatVersion;
  doc["name"] = model.name;
  doc["sensing_mode"] = to_string(model.sensing_mode);
  doc["tool_point"] = to_json(model.tool_point);
  doc["joints"] = json::array();
  for (const auto& j : model.joints) {
    doc["joints"].push_back({{"name", j.name},
                             {"kind", to_string(j.kind)},
                             {"axis", to_json(j.axis)},
                             {"origin", to_json(j.origin)},
                             {"position_limits", json::array({j.position_min, j.position_max})},
                             {"velocity_limit", j.velocity_limit}});
  }
  doc["links"] = json::array();
  for (const auto& l : model.links) {
    json caps = json::array();
    for (const auto& c : l.collision_geometry) {
      caps.push_back({{"p0", to_json(c.p0)}, {"p1", to_json(c.p1)}, {"radius", c.radius}});
    }
    doc["links"].push_back({{"name", l.name},
                            {"mass", l.mass},
                            {"com", to_json(l.com)},
                            {"inertia", to_json(l.inertia)},
                            {"collision_geometry", caps}});
  }
  doc["pads"] = json::array();
  for (const auto& p : model.pads) {
    const auto& sp = p.surface_patch;
    doc["pads"].push_back({{"id", p.id},
                           {"link", p.link},
                           {"surface_patch",
                            {{"capsule", sp.capsule},
                             {"t0", sp.t0},
                             {"t1", sp.t1},
                             {"sector", json::array({sp.phi_min, sp.phi_max})}}}});
  }
  return doc.dump(2);
}

void validate(const ScenarioConfig& s) {
  for (std::size_t i = 0; i < s.buckets.size(); ++i) {
    const auto& b = s.buckets[i];
    const std::string p = idx("buckets", i);
    if (!(b.string_length > 0.0)) throw ValidationError(p + ".string_length", "must be positive");
    if (!(b.mass > 0.0)) throw ValidationError(p + ".mass", "must be positive");
    if (!(b.bob_radius > 0.0)) throw ValidationError(p + ".bob_radius", "must be positive");
  }
  if (s.clamp) {
    if (!(s.clamp->stiffness > 0.0)) throw ValidationError("clamp.stiffness", "must be positive");
    if (std::abs(s.clamp->contact_normal.norm() - 1.0) > 1e-9) {
      throw ValidationError("clamp.contact_normal", "normal not unit");
    }
    if ((s.clamp->half_extents.array() <= 0.0).any()) {
      throw ValidationError("clamp.half_extents", "must be positive");
    }
  }
  for (std::size_t i = 0; i < s.task_script.size(); ++i) {
    const auto& seg = s.task_script[i];
    const std::string p = idx("task_script", i);
    if (std::abs(seg.direction.norm() - 1.0) > 1e-9) throw ValidationError(p + ".direction", "direction not unit");
    if (!(seg.distance > 0.0)) throw ValidationError(p + ".distance", "must be positive");
    if (seg.speed_cap && !(*seg.speed_cap > 0.0)) throw ValidationError(p + ".speed_cap", "must be positive");
  }
  if (!(s.spring_constant > 0.0)) throw ValidationError("spring_constant", "must be positive");
  if (!(s.human_mass > 0.0)) throw ValidationError("human_mass", "must be positive");
  if (!(s.gravity > 0.0)) throw ValidationError("gravity", "must be positive");
}

ScenarioConfig parse_scenario(const std::string& json_text) {
  const json doc = parse_document(json_text);
  ScenarioConfig s;
  if (auto it = doc.find("name"); it != doc.end()) s.name = as_string(*it, "name");
  if (auto it = doc.find("start_configuration"); it != doc.end()) {
    s.start_configuration = as_numbers(*it, "start_configuration", std::nullopt);
  }
  if (auto it = doc.find("buckets"); it != doc.end()) {
    if (!it->is_array()) throw ParseError("buckets: expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string p = idx("buckets", i);
      const json& bj = (*it)[i];
      BucketSpec b;
      b.name = bj.contains("name") ? as_string(bj["name"], at(p, "name")) : "B" + std::to_string(i + 1);
      b.anchor = as_vec3(require(bj, "anchor", p), at(p, "anchor"));
      b.string_length = as_number(require(bj, "string_length", p), at(p, "string_length"));
      b.mass = as_number(require(bj, "mass", p), at(p, "mass"));
      b.bob_radius = as_number(require(bj, "bob_radius", p), at(p, "bob_radius"));
      s.buckets.push_back(b);
    }
  }
  if (auto it = doc.find("clamp"); it != doc.end() && !it->is_null()) {
    ClampSpec c;
    if (it->contains("name")) c.name = as_string((*it)["name"], "clamp.name");
    c.position = as_vec3(require(*it, "position", "clamp"), "clamp.position");
    c.stiffness = as_number(require(*it, "stiffness", "clamp"), "clamp.stiffness");
    c.contact_normal = as_vec3(require(*it, "contact_normal", "clamp"), "clamp.contact_normal");
    if (it->contains("half_extents")) c.half_extents = as_vec3((*it)["half_extents"], "clamp.half_extents");
    s.clamp = c;
  }
  if (auto it = doc.find("task_script"); it != doc.end()) {
    if (!it->is_array()) throw ParseError("task_script: expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string p = idx("task_script", i);
      const json& sj = (*it)[i];
      TaskSegment seg;
      seg.direction = as_vec3(require(sj, "direction", p), at(p, "direction"));
      seg.distance = as_number(require(sj, "distance", p), at(p, "distance"));
      if (auto cap = sj.find("speed_cap"); cap != sj.end() && !cap->is_null()) {
        seg.speed_cap = as_number(*cap, at(p, "speed_cap"));
      }
      s.task_script.push_back(seg);
    }
  }
  if (auto it = doc.find("spring_constant"); it != doc.end()) s.spring_constant = as_number(*it, "spring_constant");
  if (auto it = doc.find("human_mass"); it != doc.end()) s.human_mass = as_number(*it, "human_mass");
  if (auto it = doc.find("gravity"); it != doc.end()) s.gravity = as_number(*it, "gravity");
  validate(s);
  return s;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  return parse_scenario(read_text_file(path));
}

void validate_pair(const RobotModel& model, const ScenarioConfig& scenario) {
  if (scenario.start_configuration.size() != model.dof()) {
    throw ValidationError("start_configuration", "expected " + std::to_string(model.dof()) +
                                                     " joint values, got " +
                                                     std::to_string(scenario.start_configuration.size()));
  }
  for (std::size_t i = 0; i < model.dof(); ++i) {
    const auto& j = model.joints[i];
    const double q = scenario.start_configuration[i];
    if (q < j.position_min || q > j.position_max) {
      throw ValidationError(idx("start_configuration", i), "outside joint position limits");
    }
  }
}

}  // namespace hrc
