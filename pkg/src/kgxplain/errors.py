"""Exception hierarchy shared across the toolkit.

Every error carries a stable machine-readable ``code`` so the CLI and the
HTTP service can map failures without string matching.
"""


class KgxplainError(Exception):
    """Base class for all toolkit errors."""

    code = "error"


# --- knowledge graph -------------------------------------------------------

class GraphError(KgxplainError):
    code = "graph_error"


class DuplicateNodeId(GraphError):
    code = "duplicate_node_id"


class DuplicateEdge(GraphError):
    code = "duplicate_edge"


class UnknownNode(GraphError):
    code = "unknown_node"


class UnknownEndpoint(GraphError):
    code = "unknown_endpoint"


class TaxonomyCycle(GraphError):
    code = "taxonomy_cycle"


class LevelOrderViolation(GraphError):
    code = "level_order_violation"


class InvariantViolation(GraphError):
    code = "invariant_violation"


class ParseError(KgxplainError):
    """Corpus file could not be parsed; message includes line/field info."""

    code = "parse_error"

    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(message + suffix)


# --- relation extraction ---------------------------------------------------

class EmptyDocument(KgxplainError):
    code = "empty_document"


# --- recommendation --------------------------------------------------------

class NoPathFound(KgxplainError):
    code = "no_path_found"


class NotAGoal(KgxplainError):
    code = "not_a_goal"


class NotALearningObject(KgxplainError):
    code = "not_a_learning_object"


class InvalidPath(KgxplainError):
    code = "invalid_path"


# --- prompting -------------------------------------------------------------

class InvalidTemplate(KgxplainError):
    code = "invalid_template"


class MissingRole(InvalidTemplate):
    code = "missing_role"


class MissingSlotAnswer(KgxplainError):
    code = "missing_slot_answer"

    def __init__(self, slot):
        self.slot = slot
        super().__init__(f"response contains no answer block for slot {slot!r}")


class MalformedResponse(KgxplainError):
    code = "malformed_response"


class MalformedPrompt(KgxplainError):
    code = "malformed_prompt"


# --- generation backends ---------------------------------------------------

class BackendError(KgxplainError):
    code = "backend_error"


class BackendUnavailable(BackendError):
    code = "backend_unavailable"


class AuthError(BackendError):
    code = "auth_error"


class ProtocolError(BackendError):
    code = "protocol_error"


class Timeout(BackendError):
    code = "timeout"


# --- metrics / evaluation --------------------------------------------------

class EmptyReference(KgxplainError):
    code = "empty_reference"


class EmptyMetadata(KgxplainError):
    code = "empty_metadata"


# --- service ---------------------------------------------------------------

class WrongPhase(KgxplainError):
    code = "wrong_phase"


class UnresolvedTarget(KgxplainError):
    code = "unresolved_target"

    def __init__(self, message, candidates=()):
        self.candidates = list(candidates)
        super().__init__(message)


class UnknownSession(KgxplainError):
    code = "unknown_session"
