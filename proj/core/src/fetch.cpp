#include "citeweave/fetch.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "citeweave/masking.hpp"

namespace citeweave::corpus {

using nlohmann::json;

ApiConfig ApiConfig::from_env() {
  ApiConfig config;
  if (const char* v = std::getenv("CITEWEAVE_API_BASE_URL")) config.base_url = v;
  if (const char* v = std::getenv("CITEWEAVE_API_KEY")) config.api_key = v;
  if (const char* v = std::getenv("CITEWEAVE_API_TIMEOUT")) {
    config.timeout = std::chrono::milliseconds(static_cast<long>(std::atof(v) * 1000));
  }
  return config;
}

namespace {

// Splits "https://host:port/prefix" into origin and path prefix.
std::pair<std::string, std::string> split_base_url(const std::string& url) {
  const auto scheme = url.find("://");
  const auto path_start = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  if (path_start == std::string::npos) return {url, ""};
  std::string prefix = url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {url.substr(0, path_start), prefix};
}

class HttplibTransport final : public HttpTransport {
 public:
  explicit HttplibTransport(const ApiConfig& config) : config_(config) {
    auto [origin, prefix] = split_base_url(config.base_url);
    origin_ = std::move(origin);
    prefix_ = std::move(prefix);
  }

  HttpResponse get(const std::string& path_and_query) override {
    // httplib::Client is not safe to share across threads; one per request.
    httplib::Client client(origin_);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    httplib::Headers headers;
    if (!config_.api_key.empty()) headers.emplace("x-api-key", config_.api_key);
    auto res = client.Get(prefix_ + path_and_query, headers);
    if (!res) throw FetchError("request to " + origin_ + prefix_ + path_and_query + " failed: " +
                               httplib::to_string(res.error()));
    return HttpResponse{res->status, res->body};
  }

 private:
  ApiConfig config_;
  std::string origin_;
  std::string prefix_;
};

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string string_or_empty(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) return {};
  return it->get<std::string>();
}

std::optional<std::string> find_section(const json& sections, std::initializer_list<const char*> names) {
  for (const auto& section : sections) {
    const std::string heading = lower(string_or_empty(section, "heading"));
    for (const char* name : names) {
      if (heading.find(name) != std::string::npos) {
        std::string text = string_or_empty(section, "text");
        if (!text.empty()) return text;
      }
    }
  }
  return std::nullopt;
}

std::string url_encode(const std::string& s) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~' || c == ':') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 15];
    }
  }
  return out;
}

}  // namespace

std::unique_ptr<HttpTransport> make_http_transport(const ApiConfig& config) {
  if (config.base_url.empty()) throw PreconditionError("API base URL is not configured");
  return std::make_unique<HttplibTransport>(config);
}

PaperFetcher::PaperFetcher(HttpTransport& transport, ApiConfig config, Sleeper sleeper)
    : transport_(transport), config_(std::move(config)), sleeper_(std::move(sleeper)) {
  if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  if (config_.max_in_flight == 0) config_.max_in_flight = 1;
}

namespace {

json parse_record(const std::string& body) {
  try {
    return json::parse(body);
  } catch (const json::parse_error& e) {
    throw FetchError(std::string("malformed API response: ") + e.what());
  }
}

}  // namespace

std::string PaperFetcher::get_json(const std::string& path) {
  auto backoff = config_.initial_backoff;
  for (int attempt = 0;; ++attempt) {
    HttpResponse res = transport_.get(path);
    if (res.status == 200) return res.body;
    if (res.status == 404) throw NotFound("not found: " + path);
    if (res.status == 429) {
      if (attempt >= config_.max_retries) {
        throw RateLimited("rate limited after " + std::to_string(attempt + 1) + " attempts: " + path);
      }
      sleeper_(backoff);
      backoff *= 2;
      continue;
    }
    throw FetchError("HTTP " + std::to_string(res.status) + " for " + path);
  }
}

FetchResult PaperFetcher::fetch(const std::string& paper_id) {
  if (paper_id.empty()) throw PreconditionError("paper id must be non-empty");

  const json paper = parse_record(
      get_json("/paper/" + url_encode(paper_id) + "?fields=title,abstract,sections,relatedWorkReferences"));

  FetchResult result;
  PaperBundle& b = result.bundle;
  b.paper_id = paper_id;
  b.title = string_or_empty(paper, "title");
  b.abstract = string_or_empty(paper, "abstract");

  const json sections = paper.value("sections", json::array());
  auto intro = find_section(sections, {"introduction"});
  auto related = find_section(sections, {"related work", "background", "prior work"});
  auto conclusion = find_section(sections, {"conclusion"});
  if (b.abstract.empty()) throw MissingSection(paper_id + ": missing abstract");
  if (!intro) throw MissingSection(paper_id + ": missing introduction");
  if (!conclusion) throw MissingSection(paper_id + ": missing conclusion");

  b.abstract = mask_citations(b.abstract).text;
  b.introduction = mask_citations(*intro).text;
  b.conclusion = mask_citations(*conclusion).text;
  b.related_work = related;

  std::vector<std::string> refs;
  for (const auto& r : paper.value("relatedWorkReferences", json::array())) {
    refs.push_back(r.is_string() ? r.get<std::string>() : string_or_empty(r, "paperId"));
  }

  std::vector<CitationEntry> entries(refs.size());
  std::vector<std::exception_ptr> failures(refs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < refs.size(); i = next++) {
      try {
        const json meta = parse_record(
            get_json("/paper/" + url_encode(refs[i]) + "?fields=title,abstract,authors,year,url"));
        CitationEntry& e = entries[i];
        e.id = static_cast<int>(i) + 1;
        e.title = string_or_empty(meta, "title");
        e.abstract = string_or_empty(meta, "abstract");
        for (const auto& a : meta.value("authors", json::array())) {
          e.authors.push_back(a.is_string() ? a.get<std::string>() : string_or_empty(a, "name"));
        }
        const auto year = meta.find("year");
        e.year = (year != meta.end() && year->is_number_integer()) ? year->get<int>() : 0;
        e.url = string_or_empty(meta, "url");
        if (e.title.empty()) e.title = refs[i];
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_workers = std::min(config_.max_in_flight, refs.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  for (const auto& e : entries) {
    if (e.abstract.empty()) {
      result.warnings.push_back(FetchWarning{FetchWarning::Kind::kPartialCitation, e.id,
                                             "citation " + std::to_string(e.id) + " has no abstract"});
    }
  }
  b.citations = std::move(entries);
  return result;
}

}  // namespace citeweave::corpus
