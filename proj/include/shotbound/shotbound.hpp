#pragma once

#include "shotbound/errors.hpp"
#include "shotbound/linalg.hpp"
#include "shotbound/qcore.hpp"
#include "shotbound/circuit.hpp"
#include "shotbound/sdp.hpp"
#include "shotbound/discrimination.hpp"
#include "shotbound/data.hpp"
#include "shotbound/singleshot.hpp"
#include "shotbound/depth.hpp"
#include "shotbound/io_json.hpp"
