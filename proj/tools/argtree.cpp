// argtree: train, tag, evaluate and serve argument-structure models.

#include <csignal>
#include <ctime>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "argtree/argtree.hpp"
#include "argtree/http_server.hpp"

namespace {

using namespace argtree;

std::string today() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[16];
  std::strftime(buf, sizeof buf, "%Y-%m-%d", &tm);
  return buf;
}

std::string ratio_text(double r) {
  if (!std::isfinite(r)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", r);
  return buf;
}

void print_positions(const std::vector<std::string>& daughters, const FunctionPrediction& p) {
  for (std::size_t i = 0; i < daughters.size(); ++i) {
    const auto& q = p.positions[i];
    std::cout << daughters[i] << '\t' << q.function << '\t' << to_string(q.grade.level) << '\t' << ratio_text(q.grade.ratio) << '\t'
              << (q.second ? q.second->function : "-") << '\n';
  }
}

HttpServer* g_server = nullptr;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Argument-structure annotation tools"};
  app.require_subcommand(1);

  std::string corpus_path, model_path, json_path, category, trained_at, autosave;
  std::vector<std::string> daughters;
  Thresholds th;
  std::size_t folds = 10;
  std::uint64_t seed = 0;
  int port = 8080;
  bool no_autosave = false, as_json = false;

  auto add_thresholds = [&](CLI::App* c) {
    c->add_option("--theta1", th.unreliable_below, "Below this ratio a decision is unreliable")->capture_default_str();
    c->add_option("--theta2", th.reliable_from, "From this ratio on a decision is reliable; also the beam")->capture_default_str();
  };

  auto* train_cmd = app.add_subcommand("train", "Train category models from a corpus");
  train_cmd->add_option("--corpus", corpus_path, "Corpus file (tagsets next to it)")->required();
  train_cmd->add_option("--model", model_path, "Output model archive")->required();
  train_cmd->add_option("--trained-at", trained_at, "Timestamp stored in the archive (default: today)");

  auto* tf = app.add_subcommand("tag-functions", "Assign grammatical functions to a daughter sequence");
  tf->add_option("--model", model_path, "Model archive")->required();
  tf->add_option("--category", category, "Mother category")->required();
  tf->add_option("daughters", daughters, "Daughter labels in anchor order")->required();
  tf->add_flag("--json", as_json, "Print JSON");
  add_thresholds(tf);

  auto* tp = app.add_subcommand("tag-phrase", "Assign a phrase category and functions to a daughter sequence");
  tp->add_option("--model", model_path, "Model archive")->required();
  tp->add_option("daughters", daughters, "Daughter labels in anchor order")->required();
  tp->add_flag("--json", as_json, "Print JSON");
  add_thresholds(tp);

  auto* ev = app.add_subcommand("eval", "Cross-validate both taggers and print accuracy tables");
  ev->add_option("--corpus", corpus_path, "Corpus file")->required();
  ev->add_option("--folds", folds, "Number of folds")->capture_default_str();
  ev->add_option("--seed", seed, "Fold assignment seed")->capture_default_str();
  ev->add_option("--json", json_path, "Also write a machine-readable report here");
  add_thresholds(ev);

  auto* sv = app.add_subcommand("serve", "Run the annotation service on 127.0.0.1");
  sv->add_option("--corpus", corpus_path, "Corpus file")->required();
  sv->add_option("--model", model_path, "Model archive (optional; retrain later through the API)");
  sv->add_option("--port", port, "TCP port on the loopback interface")->capture_default_str();
  sv->add_option("--autosave", autosave, "Where committed work is written (default: the corpus file)");
  sv->add_flag("--no-autosave", no_autosave, "Keep committed work in memory only");
  add_thresholds(sv);

  CLI11_PARSE(app, argc, argv);

  try {
    th.check();
    if (*train_cmd) {
      const Corpus c = read_corpus(corpus_path);
      const ModelArchive a = train_archive(c, trained_at.empty() ? today() : trained_at);
      save_model_file(model_path, a);
      std::cerr << "trained " << a.models.size() << " category models on " << a.metadata.sentences << " sentences\n";
    } else if (*tf) {
      const ModelArchive a = load_model_file(model_path);
      const auto it = a.models.find(category);
      if (it == a.models.end()) throw ModelError("no model for category '" + category + "'");
      const auto p = decode(it->second, daughters, th);
      if (as_json) {
        std::vector<int> idx(daughters.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i + 1);
        std::cout << function_prediction_json(p, idx).dump(2) << '\n';
      } else {
        print_positions(daughters, p);
      }
    } else if (*tp) {
      const ModelArchive a = load_model_file(model_path);
      const auto p = decode_phrase(a.models, daughters, th);
      if (as_json) {
        std::vector<int> idx(daughters.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i + 1);
        json j{{"category", p.category}, {"grade", grade_json(p.category_grade)}, {"functions", function_prediction_json(p.function_prediction, idx)}};
        j["alternative"] = p.runner_up ? json(*p.runner_up) : json(nullptr);
        std::cout << j.dump(2) << '\n';
      } else {
        std::cout << p.category << '\t' << to_string(p.category_grade.level) << '\t' << ratio_text(p.category_grade.ratio) << '\t'
                  << p.runner_up.value_or("-") << '\n';
        print_positions(daughters, p.function_prediction);
      }
    } else if (*ev) {
      const Corpus c = read_corpus(corpus_path);
      const auto plan = make_fold_plan(c, folds, seed);
      const auto f = cross_validate_functions(c, plan, th);
      const auto p = cross_validate_phrases(c, plan, th);
      std::cout << render_report(f) << '\n' << render_report(p);
      if (!json_path.empty()) {
        nlohmann::ordered_json j{{"functions", report_json(f)}, {"phrases", report_json(p)}};
        write_file_atomic(json_path, j.dump(2) + "\n");
      }
    } else if (*sv) {
      Corpus c = read_corpus(corpus_path);
      std::optional<ModelArchive> model;
      if (!model_path.empty()) model = load_model_file(model_path);
      AnnotationService::Options opt;
      opt.thresholds = th;
      if (!no_autosave) opt.autosave = autosave.empty() ? corpus_path : autosave;
      AnnotationService service(std::move(c), std::move(model), opt);
      HttpServer server(service);
      const int bound = server.bind(port);
      g_server = &server;
      std::signal(SIGINT, [](int) { if (g_server) g_server->stop(); });
      std::signal(SIGTERM, [](int) { if (g_server) g_server->stop(); });
      std::cerr << "listening on 127.0.0.1:" << bound << '\n';
      server.listen();
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
