// Tour of the core pipeline on the middle-thirds set: code a rational, read
// off its intrinsic denominator, then run the pigeonhole approximation along
// a seeded random point.

#include <iostream>

#include "rifs/coding.hpp"
#include "rifs/dirichlet.hpp"
#include "rifs/ifs.hpp"
#include "rifs/stream.hpp"

int main() {
  using namespace rifs;
  RationalIFS cantor = RationalIFS::cantor();

  std::cout << "hull [" << cantor.hull().lo.reduced().str() << ", "
            << cantor.hull().hi.reduced().str() << "]"
            << ", dimension " << cantor.dimension().value << "\n\n";

  for (const char* text : {"1/4", "1/3", "3/10", "1/7"}) {
    Rational x(Int(text[0] - '0'), Int(std::string(text).substr(2), 10));
    auto outcome = code_rational(cantor, x);
    std::cout << x.str() << ": " << coding_status_name(outcome.status);
    if (outcome.ok())
      std::cout << "  word " << cantor.render(outcome.coded->word) << "  q_int "
                << outcome.coded->q_int.get_str() << "  q_red " << outcome.coded->q_red.get_str();
    else
      std::cout << "  partial '" << cantor.render(outcome.partial) << "'";
    std::cout << "\n";
  }

  std::cout << "\napproximating a seeded random point:\n";
  DigitStream x = DigitStream::random(7, 2);
  for (unsigned e : {4u, 8u, 12u}) {
    Int Q = int_pow(3, e);
    auto r = dirichlet_approximate(cantor, x, Q);
    std::cout << "Q=3^" << e << "  word " << cantor.render(r.word) << "  q="
              << r.q_unreduced.get_str() << "  err<=" << r.error_enclosure.hi.to_double() << "\n";
  }
  return 0;
}
