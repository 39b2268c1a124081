#include "xflie/lsg/serialize.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace xflie::lsg {

namespace {

using Json = nlohmann::ordered_json;

Json vec3(const Eigen::Vector3d& v) { return Json::array({v.x(), v.y(), v.z()}); }

Json quat(const Eigen::Quaterniond& q) { return Json::array({q.w(), q.x(), q.y(), q.z()}); }

Json edges(const std::vector<WeightedEdge>& es) {
  Json out = Json::array();
  for (const auto& e : es) out.push_back(Json{{"a", e.a}, {"b", e.b}, {"weight", e.weight}});
  return out;
}

Json pose_graph(const PoseGraph& pg) {
  Json nodes = Json::array();
  for (const auto& p : pg.nodes) {
    Json features = Json::array();
    for (const auto& f : p.features.nodes) {
      features.push_back(Json{{"id", f.id},
                              {"label", f.label},
                              {"position", vec3(f.position)},
                              {"class", f.sem_class},
                              {"confidence", f.confidence},
                              {"seg_area", f.seg_area}});
    }
    nodes.push_back(Json{{"id", p.id},
                         {"label", p.label},
                         {"position", vec3(p.pose.position)},
                         {"orientation", quat(p.pose.orientation)},
                         {"image_ref", p.image_ref},
                         {"features", std::move(features)}});
  }
  return Json{{"parent", pg.parent_level_id}, {"nodes", std::move(nodes)}, {"edges", edges(pg.edges)}};
}

Json level_graph(const LevelGraph& lg) {
  Json nodes = Json::array();
  for (const auto& l : lg.nodes) {
    nodes.push_back(Json{{"id", l.id},
                         {"label", l.label},
                         {"index", l.index},
                         {"position", vec3(l.position)},
                         {"poses", pose_graph(l.poses)}});
  }
  return Json{{"parent", lg.parent_target_id}, {"nodes", std::move(nodes)}, {"edges", edges(lg.edges)}};
}

// --- reading -------------------------------------------------------------

[[noreturn]] void malformed(const std::string& what) { throw Error(Errc::MalformedDocument, what); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) malformed(std::string("expected object around '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) malformed(std::string("missing field '") + key + "'");
  return *it;
}

double number(const Json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_number()) malformed(std::string("field '") + key + "' is not a number");
  return v.get<double>();
}

NodeId id_of(const Json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    malformed(std::string("field '") + key + "' is not an id");
  }
  return v.get<NodeId>();
}

std::string text(const Json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_string()) malformed(std::string("field '") + key + "' is not a string");
  return v.get<std::string>();
}

const Json& array(const Json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_array()) malformed(std::string("field '") + key + "' is not an array");
  return v;
}

Eigen::Vector3d read_vec3(const Json& j, const char* key) {
  const auto& v = array(j, key);
  if (v.size() != 3) malformed(std::string("field '") + key + "' must have 3 components");
  Eigen::Vector3d out;
  for (int i = 0; i < 3; ++i) {
    if (!v[i].is_number()) malformed(std::string("field '") + key + "' has a non-numeric component");
    out[i] = v[i].get<double>();
  }
  return out;
}

Eigen::Quaterniond read_quat(const Json& j, const char* key) {
  const auto& v = array(j, key);
  if (v.size() != 4) malformed(std::string("field '") + key + "' must have 4 components");
  for (const auto& c : v) {
    if (!c.is_number()) malformed(std::string("field '") + key + "' has a non-numeric component");
  }
  return Eigen::Quaterniond(v[0].get<double>(), v[1].get<double>(), v[2].get<double>(),
                            v[3].get<double>());
}

std::vector<WeightedEdge> read_edges(const Json& j, const char* key) {
  std::vector<WeightedEdge> out;
  for (const auto& e : array(j, key)) out.push_back({id_of(e, "a"), id_of(e, "b"), number(e, "weight")});
  return out;
}

PoseGraph read_pose_graph(const Json& j) {
  PoseGraph pg;
  pg.parent_level_id = id_of(j, "parent");
  for (const auto& pj : array(j, "nodes")) {
    PoseNode p;
    p.id = id_of(pj, "id");
    p.label = text(pj, "label");
    p.pose.position = read_vec3(pj, "position");
    p.pose.orientation = read_quat(pj, "orientation");
    p.image_ref = text(pj, "image_ref");
    p.features.parent_pose_id = p.id;
    for (const auto& fj : array(pj, "features")) {
      FeatureNode f;
      f.id = id_of(fj, "id");
      f.label = text(fj, "label");
      f.position = read_vec3(fj, "position");
      f.sem_class = text(fj, "class");
      f.confidence = number(fj, "confidence");
      f.seg_area = number(fj, "seg_area");
      p.features.nodes.push_back(std::move(f));
    }
    pg.nodes.push_back(std::move(p));
  }
  pg.edges = read_edges(j, "edges");
  return pg;
}

LevelGraph read_level_graph(const Json& j) {
  LevelGraph lg;
  lg.parent_target_id = id_of(j, "parent");
  for (const auto& lj : array(j, "nodes")) {
    LevelNode l;
    l.id = id_of(lj, "id");
    l.label = text(lj, "label");
    l.index = static_cast<std::uint32_t>(id_of(lj, "index"));
    l.position = read_vec3(lj, "position");
    l.poses = read_pose_graph(field(lj, "poses"));
    lg.nodes.push_back(std::move(l));
  }
  lg.edges = read_edges(j, "edges");
  return lg;
}

TargetStatus read_status(const Json& j) {
  const std::string s = text(j, "status");
  if (s == "Detected") return TargetStatus::Detected;
  if (s == "Inspected") return TargetStatus::Inspected;
  malformed("unknown status '" + s + "'");
}

}  // namespace

std::string serialize(const LayeredSemanticGraph& g) {
  Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["next_node_id"] = g.next_node_id();
  doc["root_pose"] = Json{{"id", g.root().id},
                          {"position", vec3(g.root().pose.position)},
                          {"orientation", quat(g.root().pose.orientation)}};
  Json counters = Json::object();
  for (const auto& [cls, n] : g.class_counters()) counters[cls] = n;
  doc["class_counters"] = std::move(counters);

  Json targets = Json::array();
  for (const auto& t : g.targets()) {
    Json tj{{"id", t.id},
            {"label", t.label},
            {"status", to_string(t.status)},
            {"position", vec3(t.position)},
            {"image_ref", t.image_ref},
            {"class", t.sem_class},
            {"confidence", t.confidence},
            {"seg_area", t.seg_area},
            {"utility", t.utility},
            {"root_edge_weight", t.root_edge_weight}};
    if (t.polygon) {
      Json poly = Json::array();
      for (const auto& v : t.polygon->vertices()) poly.push_back(Json::array({v.x(), v.y()}));
      tj["polygon"] = std::move(poly);
    } else {
      tj["polygon"] = nullptr;
    }
    tj["levels"] = t.levels ? level_graph(*t.levels) : Json(nullptr);
    targets.push_back(std::move(tj));
  }
  doc["targets"] = std::move(targets);
  doc["inspected_edges"] = edges(g.inspected_edges());
  return doc.dump(2) + "\n";
}

LayeredSemanticGraph deserialize(std::string_view document) {
  Json doc;
  try {
    doc = Json::parse(document.begin(), document.end());
  } catch (const nlohmann::json::exception& e) {
    malformed(e.what());
  }
  if (!doc.is_object() || !doc.contains("schema_version")) malformed("missing schema_version");
  if (!doc["schema_version"].is_number_integer()) malformed("schema_version is not an integer");
  if (doc["schema_version"].get<int>() != kSchemaVersion) {
    throw Error(Errc::SchemaVersionMismatch,
                "document " + std::to_string(doc["schema_version"].get<int>()) + ", expected " +
                    std::to_string(kSchemaVersion));
  }

  LayeredSemanticGraph g;
  GraphAccess::next_node_id(g) = id_of(doc, "next_node_id");
  const auto& rj = field(doc, "root_pose");
  auto& root = GraphAccess::root(g);
  root.id = id_of(rj, "id");
  root.pose.position = read_vec3(rj, "position");
  root.pose.orientation = read_quat(rj, "orientation");

  const auto& counters = field(doc, "class_counters");
  if (!counters.is_object()) malformed("class_counters is not an object");
  for (const auto& [cls, n] : counters.items()) {
    if (!n.is_number_unsigned()) malformed("class counter is not unsigned");
    GraphAccess::class_counters(g)[cls] = n.get<std::uint64_t>();
  }

  auto& targets = GraphAccess::targets(g);
  for (const auto& tj : array(doc, "targets")) {
    TargetNode t;
    t.id = id_of(tj, "id");
    t.label = text(tj, "label");
    t.status = read_status(tj);
    t.position = read_vec3(tj, "position");
    t.image_ref = text(tj, "image_ref");
    t.sem_class = text(tj, "class");
    t.confidence = number(tj, "confidence");
    t.seg_area = number(tj, "seg_area");
    t.utility = number(tj, "utility");
    t.root_edge_weight = number(tj, "root_edge_weight");
    const auto& poly = field(tj, "polygon");
    if (!poly.is_null()) {
      if (!poly.is_array()) malformed("polygon is not an array");
      std::vector<Eigen::Vector2d> verts;
      for (const auto& v : poly) {
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
          malformed("polygon vertex must be [x, y]");
        }
        verts.emplace_back(v[0].get<double>(), v[1].get<double>());
      }
      try {
        t.polygon = ConvexPolygon2D(verts);
      } catch (const Error& e) {
        malformed(std::string("invalid polygon: ") + e.what());
      }
    }
    const auto& levels = field(tj, "levels");
    if (!levels.is_null()) t.levels = read_level_graph(levels);
    targets.push_back(std::move(t));
  }
  GraphAccess::inspected_edges(g) = read_edges(doc, "inspected_edges");
  return g;
}

void save(const LayeredSemanticGraph& g, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << serialize(g);
}

LayeredSemanticGraph load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize(buf.str());
}

}  // namespace xflie::lsg
