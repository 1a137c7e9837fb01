//! Runtime support for generated SCC frameworks: a typed publish/subscribe
//! bus with live entity discovery, pull requests and deployment.

mod clock;
mod deploy;
mod design;
mod error;
mod event;
mod port;
mod runtime;
mod trace;
mod value;

pub use clock::{Clock, ManualClock, SystemClock};
pub use deploy::{Deployment, RunningSystem};
pub use design::{ActionDecl, ComponentDecl, ComponentKind, Design, InputDecl, Interaction, TypeDef};
pub use error::{ProviderError, RuntimeError};
pub use event::{ComponentId, DiscoveryQuery, Event};
pub use port::Port;
pub use runtime::{EntityPublisher, Handler, Runtime, RuntimeConfig};
pub use trace::{DeliveryRecord, TraceRecord};
pub use value::{enum_label, opaque_value, struct_field, Opaque, Payload, TypeDesc, Value, ValueError};
