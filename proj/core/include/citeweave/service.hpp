#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <string>

#include "citeweave/corpus.hpp"
#include "citeweave/evaluation.hpp"
#include "citeweave/llm.hpp"
#include "citeweave/pipeline.hpp"

namespace citeweave::workbench {

struct ServiceOptions {
  std::filesystem::path store_root;
  // Shared by all requests; calls into it are serialized.
  std::shared_ptr<llm::LlmBackend> backend;
  // Resolves POST /projects {"paper_id"}; unset means only bundles are accepted.
  std::function<corpus::PaperBundle(const std::string&)> ingest;
  grouping::PipelinePolicy policy;
  EvaluationConfig default_config;
  std::size_t max_projects_per_evaluation = 10;
};

struct ApiRequest {
  std::string method;
  std::string path;
  std::string body;
  std::map<std::string, std::string> headers;  // lower-case names
};

struct ApiResponse {
  int status = 200;
  std::string body;
  std::map<std::string, std::string> headers;
};

class Service {
 public:
  explicit Service(ServiceOptions options);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Routing without a socket.
  ApiResponse handle(const ApiRequest& request);

  // Binds and serves until stop(). Port 0 picks a free port.
  int bind(const std::string& host, int port);
  void serve();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace citeweave::workbench
