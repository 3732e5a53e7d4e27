use std::io::{self, BufRead, BufReader, Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{mpsc, Arc};
use std::thread;

use super::executor::{Executor, MAX_LINE_BYTES};
use super::response::Response;

pub const DEFAULT_PORT: u16 = 7777;

struct Job {
    line: Vec<u8>,
    reply: mpsc::Sender<Response>,
}

/// TCP front end. Each connection gets a reader thread; all requests are
/// funneled through one executor thread, which is the only owner of the
/// scene.
pub struct Server {
    listener: TcpListener,
    executor: Executor,
}

impl Server {
    pub fn bind(addr: impl ToSocketAddrs, executor: Executor) -> io::Result<Server> {
        Ok(Server {
            listener: TcpListener::bind(addr)?,
            executor,
        })
    }

    pub fn local_addr(&self) -> io::Result<SocketAddr> {
        self.listener.local_addr()
    }

    /// Serves until a client sends `shutdown`, then returns the executor
    /// with the final scene state.
    pub fn run(self) -> io::Result<Executor> {
        let addr = self.listener.local_addr()?;
        let stop = Arc::new(AtomicBool::new(false));
        let (tx, rx) = mpsc::channel::<Job>();

        let exec_stop = Arc::clone(&stop);
        let mut executor = self.executor;
        let exec_thread = thread::spawn(move || {
            for job in rx {
                let response = executor.execute(&job.line);
                let _ = job.reply.send(response);
                if executor.shutdown_requested() {
                    exec_stop.store(true, Ordering::SeqCst);
                    // Wake the accept loop so it sees the flag.
                    let _ = TcpStream::connect(addr);
                    break;
                }
            }
            executor
        });

        for stream in self.listener.incoming() {
            if stop.load(Ordering::SeqCst) {
                break;
            }
            let Ok(stream) = stream else { continue };
            let tx = tx.clone();
            thread::spawn(move || {
                if let Err(e) = serve_connection(stream, tx) {
                    log::debug!("connection closed: {e}");
                }
            });
        }
        drop(tx);
        exec_thread
            .join()
            .map_err(|_| io::Error::new(io::ErrorKind::Other, "executor thread panicked"))
    }
}

fn serve_connection(stream: TcpStream, jobs: mpsc::Sender<Job>) -> io::Result<()> {
    stream.set_nodelay(true)?;
    let mut writer = stream.try_clone()?;
    let mut reader = BufReader::new(stream);
    let (reply_tx, reply_rx) = mpsc::channel();
    loop {
        let mut line = Vec::new();
        let n = (&mut reader)
            .take(MAX_LINE_BYTES as u64 + 2)
            .read_until(b'\n', &mut line)?;
        if n == 0 {
            return Ok(());
        }
        let terminated = line.last() == Some(&b'\n');
        let response = if terminated || n <= MAX_LINE_BYTES {
            if terminated {
                line.pop();
            }
            let job = Job {
                line,
                reply: reply_tx.clone(),
            };
            if jobs.send(job).is_err() {
                return Ok(());
            }
            let Ok(r) = reply_rx.recv() else { return Ok(()) };
            r
        } else {
            skip_line(&mut reader)?;
            Response::err("line_too_long", format!("request exceeds {MAX_LINE_BYTES} bytes"))
        };
        writer.write_all(&response.to_bytes())?;
    }
}

fn skip_line(reader: &mut impl BufRead) -> io::Result<()> {
    loop {
        let buf = reader.fill_buf()?;
        if buf.is_empty() {
            return Ok(());
        }
        if let Some(i) = buf.iter().position(|b| *b == b'\n') {
            reader.consume(i + 1);
            return Ok(());
        }
        let len = buf.len();
        reader.consume(len);
    }
}
