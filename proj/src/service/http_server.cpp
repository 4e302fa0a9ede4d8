#include <iostream>

#include "equivar/service.hpp"

// After Eigen: <resolv.h> defines a _res macro that breaks Eigen headers.
#include "httplib.h"

namespace equivar::service {

int serve(Service& service) {
  httplib::Server server;
  const auto forward = [&service](const httplib::Request& req, httplib::Response& res) {
    const Response r = service.handle(req.method, req.target, req.body);
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  server.Get(".*", forward);
  server.Post(".*", forward);
  server.Put(".*", forward);
  server.Delete(".*", forward);
  server.Patch(".*", forward);
  const ApiConfig& c = service.config();
  std::cerr << "listening on http://" << c.bind_address << ':' << c.port << '\n';
  if (!server.listen(c.bind_address, c.port)) {
    std::cerr << "cannot bind " << c.bind_address << ':' << c.port << '\n';
    return 1;
  }
  return 0;
}

}  // namespace equivar::service
