#include "rell/vocab.hpp"

namespace rell::vocab {

std::string service_ns(std::string_view service_id) {
  return std::string(kServiceBase) + std::string(service_id) + "#";
}

Term service_term(std::string_view service_id, std::string_view local) {
  return Term::iri(service_ns(service_id) + std::string(local));
}

std::string media_type_local(std::string_view media_type) {
  std::string out;
  for (char c : media_type) {
    if (c == '/') {
      out += '.';
    } else if (c == '+') {
      out += '-';
    } else {
      out += c;
    }
  }
  return out;
}

Term media_type_class(std::string_view media_type) {
  return Term::iri(std::string(kMediaType) + media_type_local(media_type));
}

Term media_type_top_class(std::string_view media_type) {
  auto slash = media_type.find('/');
  std::string_view top =
      slash == std::string_view::npos ? media_type : media_type.substr(0, slash);
  return Term::iri(std::string(kMediaType) + std::string(top));
}

}  // namespace rell::vocab
