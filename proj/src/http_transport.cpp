#include <httplib.h>

#include "ironylab/gateway.hpp"

namespace ironylab {

namespace {

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string target;  // /path?query
};

ParsedUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ProviderFailure(ProviderFailure::Kind::Network, 0, "malformed URL: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

class HttplibTransport final : public HttpTransport {
 public:
  HttpResponse post(const HttpRequest& request, std::chrono::milliseconds timeout) override {
    const ParsedUrl url = split_url(request.url);
    httplib::Client client(url.origin);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout).count());
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout).count());
    client.set_write_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout).count());

    httplib::Headers headers;
    std::string content_type = "application/json";
    for (const auto& [k, v] : request.headers) {
      if (k == "Content-Type") {
        content_type = v;
      } else {
        headers.emplace(k, v);
      }
    }
    auto res = client.Post(url.target, headers, request.body, content_type);
    if (!res) {
      const auto err = res.error();
      const bool timed_out = err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout ||
                             err == httplib::Error::Write;
      throw ProviderFailure(timed_out ? ProviderFailure::Kind::Timeout : ProviderFailure::Kind::Network, 0,
                            "transport error: " + httplib::to_string(err));
    }
    return {res->status, res->body};
  }
};

}  // namespace

std::shared_ptr<HttpTransport> make_http_transport() { return std::make_shared<HttplibTransport>(); }

}  // namespace ironylab
