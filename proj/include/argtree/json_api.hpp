#ifndef ARGTREE_JSON_API_HPP
#define ARGTREE_JSON_API_HPP

#include <cmath>
#include <regex>
#include <string>

#include "json.hpp"

#include "argtree/service.hpp"

namespace argtree {

using nlohmann::json;

struct ApiResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

// ---- wire format ----

inline json tree_to_json(const SyntaxTree& t) {
  json tokens = json::array(), nodes = json::array(), edges = json::array();
  for (const auto& k : t.tokens) tokens.push_back({{"id", k.position}, {"form", k.form}, {"pos", k.pos}});
  for (const auto& n : t.nodes) nodes.push_back({{"id", n.id}, {"category", n.category}});
  for (const auto& e : t.edges) edges.push_back({{"child", e.child}, {"parent", e.parent}, {"label", e.label}});
  json j{{"tokens", tokens}, {"nodes", nodes}, {"edges", edges}};
  j["comment"] = t.comment ? json(*t.comment) : json(nullptr);
  return j;
}

inline SyntaxTree tree_from_json(const json& j) {
  SyntaxTree t;
  for (const auto& k : j.at("tokens")) t.tokens.push_back({k.at("id").get<int>(), k.at("form").get<std::string>(), k.at("pos").get<std::string>()});
  for (const auto& n : j.value("nodes", json::array())) t.nodes.push_back({n.at("id").get<int>(), n.at("category").get<std::string>()});
  for (const auto& e : j.at("edges"))
    t.edges.push_back({e.at("child").get<int>(), e.at("parent").get<int>(), e.at("label").get<std::string>()});
  if (j.contains("comment") && !j["comment"].is_null()) t.comment = j["comment"].get<std::string>();
  normalize(t);
  return t;
}

// Infinite ratios (no competitor in the beam) are sent as null.
inline json ratio_json(double r) { return std::isfinite(r) ? json(r) : json(nullptr); }

inline json grade_json(const Grade& g) { return {{"level", to_string(g.level)}, {"ratio", ratio_json(g.ratio)}}; }

inline json slot_json(const Slot& s, int index) {
  json j{{"slot", index}, {"status", to_string(s.status)}};
  if (index != kCategorySlot) j["child"] = s.child;
  j["value"] = s.value.empty() ? json(nullptr) : json(s.value);
  j["predicted"] = s.predicted ? json(*s.predicted) : json(nullptr);
  j["grade"] = s.grade ? grade_json(*s.grade) : json(nullptr);
  j["alternative"] = s.alternative ? json(*s.alternative) : json(nullptr);
  return j;
}

inline json proposal_json(const Proposal& p) {
  json edges = json::array();
  for (std::size_t i = 0; i < p.edges.size(); ++i) edges.push_back(slot_json(p.edges[i], static_cast<int>(i)));
  return {{"node", p.node}, {"children", p.children}, {"category", slot_json(p.category, kCategorySlot)}, {"edges", edges}};
}

inline json view_json(const SentenceView& v) {
  json pending = json::array();
  for (const auto& [id, p] : v.state.pending) pending.push_back(proposal_json(p));
  return {{"id", v.id},
          {"tree", tree_to_json(v.state.tree)},
          {"pending", pending},
          {"locked_by", v.locked_by ? json(*v.locked_by) : json(nullptr)},
          {"revision", v.revision},
          {"revisions", v.revisions}};
}

inline json function_prediction_json(const FunctionPrediction& p, const std::vector<int>& children) {
  json positions = json::array();
  for (std::size_t i = 0; i < p.positions.size(); ++i) {
    const auto& q = p.positions[i];
    json j{{"child", children[i]}, {"function", q.function}, {"grade", grade_json(q.grade)}};
    j["alternative"] = q.second ? json(q.second->function) : json(nullptr);
    positions.push_back(std::move(j));
  }
  return {{"category", p.category}, {"children", children}, {"log_probability", p.log_probability}, {"positions", positions}};
}

inline json tagset_json(const Tagset& t) {
  json a = json::array();
  for (const auto& e : t.entries()) a.push_back({{"label", e.label}, {"description", e.description}});
  return a;
}

// ---- dispatcher ----

// Routes one request to the service. Errors come back as
// {"error": {"code", "message"}} with 400, 404, 409 or 503.
class JsonApi {
 public:
  explicit JsonApi(AnnotationService& service) : svc_(service) {}

  ApiResponse handle(const std::string& method, const std::string& path, const std::string& body) {
    try {
      return route(method, path, body);
    } catch (const json::exception& e) {
      return error(400, "bad_request", e.what());
    } catch (const NotFound& e) {
      return error(404, "not_found", e.what());
    } catch (const Conflict& e) {
      return error(409, "conflict", e.what());
    } catch (const NoModel& e) {
      return error(503, "no_model", e.what());
    } catch (const ValidationError& e) {
      return error(400, "invalid_tree", e.what());
    } catch (const ModelError& e) {
      return error(409, "model", e.what());
    } catch (const Error& e) {
      return error(400, "bad_request", e.what());
    }
  }

 private:
  static ApiResponse ok(const json& j) { return {200, j.dump()}; }
  static ApiResponse error(int status, const std::string& code, const std::string& message) {
    return {status, json{{"error", {{"code", code}, {"message", message}}}}.dump()};
  }

  static std::optional<Thresholds> thresholds(const json& b) {
    if (!b.contains("theta1") && !b.contains("theta2")) return std::nullopt;
    Thresholds t;
    t.unreliable_below = b.value("theta1", t.unreliable_below);
    t.reliable_from = b.value("theta2", t.reliable_from);
    t.check();
    return t;
  }

  ApiResponse route(const std::string& method, const std::string& path, const std::string& raw) {
    static const std::regex sentence_path(R"(/api/sentences/(\d+))");
    const json b = raw.empty() ? json::object() : json::parse(raw);
    std::smatch m;

    if (method == "GET") {
      if (path == "/api/tagsets") {
        const auto& t = svc_.tagsets();
        return ok({{"word_tags", tagset_json(t.word_tags)},
                   {"phrase_categories", tagset_json(t.phrase_categories)},
                   {"edge_labels", tagset_json(t.edge_labels)}});
      }
      if (path == "/api/sentences") {
        json a = json::array();
        for (int id : svc_.sentence_ids()) {
          const auto v = svc_.view(id);
          a.push_back({{"id", id},
                       {"tokens", v.state.tree.tokens.size()},
                       {"pending", v.state.pending.size()},
                       {"locked_by", v.locked_by ? json(*v.locked_by) : json(nullptr)}});
        }
        return ok(a);
      }
      if (std::regex_match(path, m, sentence_path)) return ok(view_json(svc_.view(std::stoi(m[1]))));
      if (path == "/api/export") return {200, svc_.export_corpus(), "text/plain; charset=utf-8"};
      if (path == "/api/model") {
        const auto g = svc_.model();
        if (!g) return ok({{"generation", nullptr}});
        json cats = json::array();
        for (const auto& [q, mdl] : g->archive.models) cats.push_back(q);
        return ok({{"generation", g->number}, {"categories", cats}, {"trained_at", g->archive.metadata.trained_at}});
      }
      if (path == "/api/overrides") {
        json a = json::array();
        for (const auto& o : svc_.overrides())
          a.push_back({{"sentence", o.sentence},
                       {"node", o.node},
                       {"slot", o.slot},
                       {"category", o.category},
                       {"predicted", o.predicted ? json(*o.predicted) : json(nullptr)},
                       {"grade", o.grade ? json(to_string(*o.grade)) : json(nullptr)},
                       {"chosen", o.chosen}});
        return ok(a);
      }
    }

    if (method == "PUT" && std::regex_match(path, m, sentence_path))
      return ok(view_json(svc_.put_tree(std::stoi(m[1]), tree_from_json(b.at("tree")), who(b))));

    if (method == "POST") {
      if (path == "/api/sentences") {
        std::vector<std::pair<std::string, std::string>> words;
        for (const auto& k : b.at("tokens")) words.emplace_back(k.at("form").get<std::string>(), k.at("pos").get<std::string>());
        std::optional<std::string> comment;
        if (b.contains("comment") && !b["comment"].is_null()) comment = b["comment"].get<std::string>();
        return ok(view_json(svc_.view(svc_.add_sentence(words, comment))));
      }
      if (path == "/api/predict-functions") {
        const auto p = svc_.predict_functions(sid(b), b.at("children").get<std::vector<int>>(), b.at("category").get<std::string>(),
                                              thresholds(b));
        return ok(function_prediction_json(p.prediction, p.children));
      }
      if (path == "/api/predict-phrase") {
        const auto p = svc_.predict_phrase(sid(b), b.at("children").get<std::vector<int>>(), thresholds(b));
        json j{{"category", p.prediction.category},
               {"grade", grade_json(p.prediction.category_grade)},
               {"log_probability", p.prediction.log_probability},
               {"functions", function_prediction_json(p.prediction.function_prediction, p.children)}};
        j["alternative"] = p.prediction.runner_up ? json(*p.prediction.runner_up) : json(nullptr);
        return ok(j);
      }
      if (path == "/api/group") {
        GroupRequest req;
        req.children = b.at("children").get<std::vector<int>>();
        if (b.contains("category") && !b["category"].is_null()) req.category = b["category"].get<std::string>();
        for (const auto& l : b.value("labels", json::array())) req.labels[l.at("child").get<int>()] = l.at("label").get<std::string>();
        req.thresholds = thresholds(b);
        return ok(view_json(svc_.group(sid(b), req, who(b))));
      }
      if (path == "/api/confirm") return ok(view_json(svc_.confirm(sid(b), b.at("node"), b.at("slot"), who(b))));
      if (path == "/api/override")
        return ok(view_json(svc_.override_label(sid(b), b.at("node"), b.at("slot"), b.at("label"), who(b))));
      if (path == "/api/ungroup") return ok(view_json(svc_.ungroup(sid(b), b.at("node"), who(b))));
      if (path == "/api/relabel") {
        if (b.contains("node")) return ok(view_json(svc_.relabel_node(sid(b), b["node"], b.at("category"), who(b))));
        return ok(view_json(svc_.relabel_edge(sid(b), b.at("child"), b.at("label"), who(b))));
      }
      if (path == "/api/reattach")
        return ok(view_json(svc_.reattach_child(sid(b), b.at("child"), b.at("parent"), b.value("label", ""), who(b))));
      if (path == "/api/undo") return ok(view_json(svc_.undo(sid(b), who(b))));
      if (path == "/api/redo") return ok(view_json(svc_.redo(sid(b), who(b))));
      if (path == "/api/comment") {
        std::optional<std::string> text;
        if (b.contains("comment") && !b["comment"].is_null()) text = b["comment"].get<std::string>();
        return ok(view_json(svc_.set_comment(sid(b), text, who(b))));
      }
      if (path == "/api/lock") {
        svc_.lock(sid(b), who(b));
        return ok(view_json(svc_.view(sid(b))));
      }
      if (path == "/api/unlock") {
        svc_.unlock(sid(b), who(b));
        return ok(view_json(svc_.view(sid(b))));
      }
      if (path == "/api/retrain") {
        const auto g = svc_.retrain(b.value("trained_at", ""));
        return ok({{"generation", g->number}, {"categories", g->archive.models.size()}});
      }
    }
    return error(404, "not_found", method + " " + path + " is not an endpoint");
  }

  static int sid(const json& b) { return b.at("sentence").get<int>(); }
  static std::string who(const json& b) { return b.at("annotator").get<std::string>(); }

  AnnotationService& svc_;
};

}  // namespace argtree

#endif  // ARGTREE_JSON_API_HPP
