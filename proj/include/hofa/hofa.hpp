#ifndef HOFA_HOFA_HPP
#define HOFA_HOFA_HPP

#include "hofa/bias.hpp"
#include "hofa/certificate_io.hpp"
#include "hofa/enumerate.hpp"
#include "hofa/error.hpp"
#include "hofa/field.hpp"
#include "hofa/linalg.hpp"
#include "hofa/multilinear.hpp"
#include "hofa/pipelines.hpp"
#include "hofa/polynomial.hpp"
#include "hofa/random.hpp"
#include "hofa/rank.hpp"
#include "hofa/rkstar.hpp"
#include "hofa/suites.hpp"
#include "hofa/text_format.hpp"

#endif // HOFA_HOFA_HPP
