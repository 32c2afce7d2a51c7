#include <openssl/asn1.h>
#include <openssl/bio.h>
#include <openssl/pem.h>
#include <openssl/x509.h>
#include <openssl/x509v3.h>

#include <fstream>
#include <iterator>
#include <memory>

#include "satakit/error.hpp"
#include "satakit/validation.hpp"

namespace satakit {
namespace {

struct X509Free {
  void operator()(X509* x) const noexcept { X509_free(x); }
};
struct BioFree {
  void operator()(BIO* b) const noexcept { BIO_free(b); }
};
struct NamesFree {
  void operator()(GENERAL_NAMES* n) const noexcept { GENERAL_NAMES_free(n); }
};

Date asn1_date(const ASN1_TIME* t) {
  struct tm tm{};
  if (ASN1_TIME_to_tm(t, &tm) != 1) {
    throw Error(Errc::ParseError, "certificate has an unreadable validity date");
  }
  return Date::from_ymd(tm.tm_year + 1900, static_cast<unsigned>(tm.tm_mon + 1),
                        static_cast<unsigned>(tm.tm_mday));
}

}  // namespace

CertDescriptor parse_x509(ByteView pem_or_der) {
  if (pem_or_der.empty()) throw Error(Errc::EmptyInput, "certificate file is empty");
  std::unique_ptr<X509, X509Free> cert;
  {
    std::unique_ptr<BIO, BioFree> bio(
        BIO_new_mem_buf(pem_or_der.data(), static_cast<int>(pem_or_der.size())));
    cert.reset(PEM_read_bio_X509(bio.get(), nullptr, nullptr, nullptr));
  }
  if (!cert) {
    const unsigned char* p = pem_or_der.data();
    cert.reset(d2i_X509(nullptr, &p, static_cast<long>(pem_or_der.size())));
  }
  if (!cert) throw Error(Errc::ParseError, "not a PEM or DER X.509 certificate");

  int der_len = i2d_X509(cert.get(), nullptr);
  if (der_len <= 0) throw Error(Errc::ParseError, "could not re-encode certificate");
  Bytes der(static_cast<std::size_t>(der_len));
  unsigned char* out = der.data();
  i2d_X509(cert.get(), &out);

  std::vector<std::string> sans;
  std::unique_ptr<GENERAL_NAMES, NamesFree> names(static_cast<GENERAL_NAMES*>(
      X509_get_ext_d2i(cert.get(), NID_subject_alt_name, nullptr, nullptr)));
  if (names) {
    for (int i = 0; i < sk_GENERAL_NAME_num(names.get()); ++i) {
      const GENERAL_NAME* gn = sk_GENERAL_NAME_value(names.get(), i);
      if (gn->type != GEN_DNS) continue;
      const ASN1_IA5STRING* s = gn->d.dNSName;
      sans.emplace_back(reinterpret_cast<const char*>(ASN1_STRING_get0_data(s)),
                        static_cast<std::size_t>(ASN1_STRING_length(s)));
    }
  }
  const bool has_sct = X509_get_ext_by_NID(cert.get(), NID_ct_precert_scts, -1) >= 0;
  return make_cert_descriptor(std::move(der), std::move(sans),
                              asn1_date(X509_get0_notBefore(cert.get())),
                              asn1_date(X509_get0_notAfter(cert.get())), has_sct);
}

CertDescriptor load_certificate(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open certificate file '" + path + "'");
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_x509(data);
}

}  // namespace satakit
