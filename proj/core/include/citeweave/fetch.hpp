#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "citeweave/corpus.hpp"
#include "citeweave/error.hpp"

namespace citeweave::corpus {

// Connection settings for the academic-graph API.
struct ApiConfig {
  std::string base_url;  // e.g. "https://api.semanticscholar.org/graph/v1"
  std::string api_key;   // sent as x-api-key when non-empty
  std::chrono::milliseconds timeout{30000};
  int max_retries = 4;
  std::chrono::milliseconds initial_backoff{1000};
  std::size_t max_in_flight = 4;

  // Reads CITEWEAVE_API_BASE_URL, CITEWEAVE_API_KEY and
  // CITEWEAVE_API_TIMEOUT (seconds). Missing variables keep the defaults.
  static ApiConfig from_env();
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

// Issues GET requests relative to the API base URL. Implementations must be
// safe to call from several threads at once.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse get(const std::string& path_and_query) = 0;
};

std::unique_ptr<HttpTransport> make_http_transport(const ApiConfig& config);

class NotFound : public Error {
 public:
  using Error::Error;
};

class RateLimited : public Error {
 public:
  using Error::Error;
};

class MissingSection : public Error {
 public:
  using Error::Error;
};

class FetchError : public Error {
 public:
  using Error::Error;
};

struct FetchWarning {
  enum class Kind { kPartialCitation };
  Kind kind = Kind::kPartialCitation;
  int citation_id = 0;
  std::string message;
};

struct FetchResult {
  PaperBundle bundle;
  std::vector<FetchWarning> warnings;
};

// Assembles a PaperBundle from the API. The paper record must carry sectioned
// text and the ordered list of works cited in its related-work section:
//
//   GET /paper/{id}?fields=title,abstract,sections,relatedWorkReferences
//     {"paperId", "title", "abstract",
//      "sections": [{"heading", "text"}, ...],
//      "relatedWorkReferences": [{"paperId"}, ...]}
//   GET /paper/{ref}?fields=title,abstract,authors,year,url
//     {"title", "abstract" (nullable), "authors": [{"name"}], "year", "url"}
//
// Citation ids 1..n follow reference-list order. Citations in the abstract,
// introduction and conclusion are masked.
class PaperFetcher {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  PaperFetcher(HttpTransport& transport, ApiConfig config, Sleeper sleeper = {});

  FetchResult fetch(const std::string& paper_id);

 private:
  std::string get_json(const std::string& path);

  HttpTransport& transport_;
  ApiConfig config_;
  Sleeper sleeper_;
};

}  // namespace citeweave::corpus
